int g[3] = {1, 2, 3};
int grid[2][2] = {{1, 2}, {3, 4}};
char msg[6] = "hello";
