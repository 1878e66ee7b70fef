// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "bogospec/validate.hpp"

#include <cstdio>
#include <iostream>

int main() {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    const auto rep = bogospec::run_suite(bogospec::acceptance_fixtures());
    std::cout << rep.table() << "\n";
    for (const auto& f : rep.fixtures) std::cout << (f.ok() ? "PASS " : "FAIL ") << f.name << "\n";
    return rep.ok() ? 0 : 1;
}
