#ifndef RFID_SAMPLER_ERRORS_HPP
#define RFID_SAMPLER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rfid_sampler
{

/// Invalid population, scenario or timing parameters.
class config_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Out-of-range category or tag lookup.
class lookup_error : public std::out_of_range
{
public:
    using std::out_of_range::out_of_range;
};

/// Bad argument to a pure function (zero modulus, threshold too wide, ...).
class argument_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// A protocol run could not complete (seed pool exhausted, iteration cap hit).
class protocol_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace rfid_sampler
#endif
