#include <iostream>
int main() {
    int n;
    long long a, b;
    std::cin >> n >> a >> b;
    for (int i = 0; i < n; i++) {
        std::cout << a + b << "\n";
    }
    return 0;
}
