#pragma once

#include <functional>
#include <string>
#include <vector>

namespace bogospec {

// Where an expected value comes from.
enum class Provenance { Analytic, Oracle, SelfConvergence, Asymptotic };

const char* to_string(Provenance p);

// How measured is compared with expected:
//   Absolute |m - e| <= tol, Relative |m - e| <= tol |e|, AtMost m <= e + tol, AtLeast m >= e - tol.
enum class Relation { Absolute, Relative, AtMost, AtLeast };

struct Check {
    std::string name;
    double measured = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    Relation relation = Relation::Absolute;
    Provenance provenance = Provenance::Analytic;
    bool pass = false;
};

Check make_check(std::string name, double measured, double expected, double tolerance, Relation relation,
                 Provenance provenance);

// A boolean property recorded as measured 1 against expected 1.
Check make_flag(std::string name, bool holds, Provenance provenance);

struct Fixture {
    std::string name;
    std::string config;  // one-line description of the inputs
    std::function<std::vector<Check>()> run;
};

struct FixtureReport {
    std::string name, config;
    std::vector<Check> checks;
    double seconds = 0.0;
    std::string error;  // exception text if the fixture threw

    bool ok() const;
};

struct SuiteReport {
    std::vector<FixtureReport> fixtures;  // sorted by name

    int passed() const;  // checks
    int failed() const;  // checks plus fixtures that threw
    bool ok() const { return failed() == 0; }
    std::string table() const;
    std::string json() const;
};

// Runs fixtures on up to `threads` workers (0: BOGOSPEC_THREADS, else 1).
// Exceptions become failed entries; the report order does not depend on scheduling.
SuiteReport run_suite(const std::vector<Fixture>& fixtures, int threads = 0);

// Parallelism cap from BOGOSPEC_THREADS, at least 1.
int thread_cap();

// One fixture per invariant block of the library, on the desk case and the
// analytic special cases.
std::vector<Fixture> default_fixtures();

// The ten acceptance criteria, in order; each fixture name starts with its number.
std::vector<Fixture> acceptance_fixtures();

}  // namespace bogospec
