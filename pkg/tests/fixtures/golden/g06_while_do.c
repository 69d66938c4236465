int countdown(int n) {
    while (n > 0) {
        n = n - 1;
    }
    do {
        n++;
    } while (n < 5);
    return n;
}
