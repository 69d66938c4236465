int scan(int n) {
    int hits = 0;
    for (int i = 0; i < n; i++) {
        if (i % 2 == 0) {
            continue;
        }
        if (i > 100) {
            break;
        }
        hits++;
    }
    return hits;
}
