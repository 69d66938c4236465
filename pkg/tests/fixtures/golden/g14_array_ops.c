void fill(int a[], int n) {
    for (int i = 0; i < n; i++) {
        a[i] = i * i;
    }
}

int first(int a[]) {
    return a[0];
}
