// placeholder; filled in once the experiment modules are in place
int main() { return 0; }
