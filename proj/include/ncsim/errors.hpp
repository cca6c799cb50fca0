#ifndef NCSIM_ERRORS_HPP
#define NCSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ncsim {

enum class error_kind {
    invalid_input,        // parameter violates a model invariant
    non_convergence,      // iterative solve exhausted its budget
    parse,                // malformed config text
    validation,           // config value out of range
    window_empty,         // no data inside the requested current window
    no_crossing,          // curves do not intersect in the search window
    not_bracketed,        // predicate has the same truth value at both bounds
    criterion_not_crossed,// sweep never reaches the criterion current
    no_oscillation,       // transient settled without periodic switching
    out_of_range,         // query outside tabulated data
    degenerate_vtc,       // transfer curve has no unity-gain crossing
    io                    // filesystem failure
};

class sim_error : public std::runtime_error {
public:
    sim_error(error_kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    error_kind kind() const { return kind_; }

private:
    error_kind kind_;
};

// Convenience throwers keep call sites one line.
[[noreturn]] inline void fail(error_kind kind, const std::string& msg) {
    throw sim_error(kind, msg);
}

inline void require(bool ok, error_kind kind, const std::string& msg) {
    if (!ok) fail(kind, msg);
}

} // namespace ncsim

#endif
