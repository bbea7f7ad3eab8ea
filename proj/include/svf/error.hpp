#pragma once

#include <stdexcept>
#include <string>

namespace svf {

/// Base class for all errors thrown by this library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// A set operation received or would produce an empty set.
class empty_set_error : public error {
public:
    using error::error;
};

/// A representation budget (interval count, grid size, cloud size) was exceeded.
class capacity_error : public error {
public:
    using error::error;
};

/// A map was evaluated outside its domain.
class domain_error : public error {
public:
    using error::error;
};

/// An operation that requires convex (single-interval) values got a non-convex one.
class convexity_error : public error {
public:
    using error::error;
};

/// The base map fails the endpoint compatibility condition.
class incompatible_base_error : public error {
public:
    using error::error;
};

/// A fixed-point iteration hit its iteration cap before meeting tolerance.
class no_convergence_error : public error {
public:
    using error::error;
};

/// An endpoint value that must be a singleton is not.
class endpoint_not_singleton_error : public error {
public:
    using error::error;
};

/// The pointwise inclusion order between two maps fails on the grid.
class order_violated_error : public error {
public:
    using error::error;
};

/// A point passed to a grid-function lookup is not a grid point.
class point_not_on_grid_error : public error {
public:
    using error::error;
};

/// A log-log regression has no spread to fit (all counts equal, or too few rows).
class degenerate_fit_error : public error {
public:
    using error::error;
};

/// The polynomial degree search hit its cap without reaching the target error.
class degree_cap_error : public error {
public:
    using error::error;
};

/// An experiment configuration failed validation.
class config_error : public error {
public:
    using error::error;
};

} // namespace svf
