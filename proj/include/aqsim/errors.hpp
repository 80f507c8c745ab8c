#pragma once

#include <stdexcept>
#include <string>

namespace aqsim {

// Base class for all library errors.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// reduce(): every amplitude fell below the grain.
struct all_annihilated : error {
    explicit all_annihilated(const std::string& what) : error(what) {}
};

// State or operator dimensions do not match.
struct dimension_mismatch : error {
    explicit dimension_mismatch(const std::string& what) : error(what) {}
};

// Time step exceeds the documented accuracy bound for the grid.
struct stability_error : error {
    explicit stability_error(const std::string& what) : error(what) {}
};

// Eigensolver failed to reach the residual target.
struct convergence_error : error {
    explicit convergence_error(const std::string& what) : error(what) {}
};

// Iterative minimization hit its iteration cap before converging.
struct max_iterations : error {
    explicit max_iterations(const std::string& what) : error(what) {}
};

// Closed-form oracle evaluated outside its domain.
struct domain_error : error {
    explicit domain_error(const std::string& what) : error(what) {}
};

// A quantum would skip lattice nodes in one micro step.
struct speed_cap : error {
    explicit speed_cap(const std::string& what) : error(what) {}
};

struct empty_bubble : error {
    explicit empty_bubble(const std::string& what) : error(what) {}
};

// Free-quanta population with every net count zero.
struct all_cancelled : error {
    explicit all_cancelled(const std::string& what) : error(what) {}
};

// Requested object exceeds the configured desk-scale cap.
struct size_cap : error {
    explicit size_cap(const std::string& what) : error(what) {}
};

// expand_range() called on a configuration the term does not contribute to.
struct not_contributing : error {
    explicit not_contributing(const std::string& what) : error(what) {}
};

// Two machine rules can match the same configuration.
struct nondeterminism_error : error {
    explicit nondeterminism_error(const std::string& what) : error(what) {}
};

// Stored cache payload does not match its recorded hash.
struct cache_corruption : error {
    explicit cache_corruption(const std::string& what) : error(what) {}
};

struct parse_error : error {
    explicit parse_error(const std::string& what) : error(what) {}
};

} // namespace aqsim
