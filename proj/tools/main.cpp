#include "gather2/adversary.hpp"
#include <iostream>

int main() {
    std::cout << "gather2 cli placeholder\n";
    return 0;
}
