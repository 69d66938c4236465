char *s = "oops;
