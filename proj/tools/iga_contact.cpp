#include <igacontact/bench.hpp>
int main() { return 0; }
