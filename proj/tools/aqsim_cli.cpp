#include <cstdio>

// Placeholder until the scenario runner lands.
int main() {
    std::puts("aqsim: scenario runner not wired yet");
    return 2;
}
