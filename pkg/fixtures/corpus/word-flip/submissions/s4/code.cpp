#include <iostream>
#include <string>
#include <algorithm>
int main() {
    int n;
    std::cin >> n;
    for (int i = 0; i < n - 1; i++) {
        std::string s;
        std::cin >> s;
        std::reverse(s.begin(), s.end());
        std::cout << s << "\n";
    }
    return 0;
}
