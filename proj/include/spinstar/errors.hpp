#ifndef SPINSTAR_ERRORS_HPP
#define SPINSTAR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spinstar {

// A requested computation relies on a model assumption the inputs violate
// (e.g. the ladder protocol with nonuniform couplings, or a sampling grid
// that cannot resolve the oscillation it is supposed to capture).
class ModelAssumptionError : public std::runtime_error {
public:
    explicit ModelAssumptionError(const std::string& what_arg)
        : std::runtime_error(what_arg) {}
};

// A numerical procedure failed to produce a trustworthy result
// (non-convergence, loss of positivity beyond tolerance, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what_arg)
        : std::runtime_error(what_arg) {}
};

} // namespace spinstar

#endif // SPINSTAR_ERRORS_HPP
