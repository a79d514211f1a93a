#include <stdio.h>
#include <stdlib.h>

/* Reference kernel: x = (a * b) + c for every element. */
static int kernel(int a, int b, int c)
{
    int x;
    x = (a * b) + c;
    return x;
}

int main(int argc, char **argv)
{
    int a = argc > 1 ? atoi(argv[1]) : 2;
    int b = argc > 2 ? atoi(argv[2]) : 3;
    int c = argc > 3 ? atoi(argv[3]) : 4;
    const char *label = "x = (a * b) + c";

    // The loop below repeats a * b + c to exercise the instruction.
    long sum = 0;
    for (int i = 0; i < 1000; i++) {
        sum += a * b + c;
    }
    printf("%s = %d, sum = %ld\n", label, kernel(a, b, c), sum);
    printf("%d\n", (a + b) * c);
    return 0;
}
