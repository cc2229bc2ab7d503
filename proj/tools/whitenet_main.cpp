#include <iostream>

int main() {
  std::cout << "whitenet cli (under construction)\n";
  return 0;
}
