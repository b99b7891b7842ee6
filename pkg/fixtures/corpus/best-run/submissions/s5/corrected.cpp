#include <iostream>
int main() {
    int n;
    std::cin >> n;
    long long best = 0, cur = 0;
    for (int i = 0; i < n; i++) {
        long long x;
        std::cin >> x;
        if (i == 0) {
            cur = x;
            best = x;
        } else {
            cur = cur + x > x ? cur + x : x;
            if (cur > best) best = cur;
        }
    }
    std::cout << best << "\n";
    return 0;
}
