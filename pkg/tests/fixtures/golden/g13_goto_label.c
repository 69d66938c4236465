int find_first(int n) {
    int i = 0;
loop:
    if (i >= n) {
        goto done;
    }
    i++;
    goto loop;
done:
    return i;
}
