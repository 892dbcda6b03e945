#include <irlw/experiment.hpp>
int main() { return 0; }
