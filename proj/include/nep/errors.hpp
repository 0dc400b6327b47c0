#pragma once

#include <stdexcept>
#include <string>

namespace nep {

/// Base class for every numeric-domain failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Spectrum has a single distinct value per component (zero information variance).
class DegenerateSpectrum : public Error {
public:
    using Error::Error;
};

/// Requested deviation is negative or not below the reachable supremum.
class DeltaOutOfRange : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class InvalidDistribution : public Error {
public:
    using Error::Error;
};

class ZeroMarginal : public Error {
public:
    using Error::Error;
};

class NotFullSupport : public Error {
public:
    using Error::Error;
};

class FiniteChannelRequired : public Error {
public:
    using Error::Error;
};

/// Exact enumeration would exceed the configured work limit.
class TooLarge : public Error {
public:
    using Error::Error;
};

class EpsilonOutOfRange : public Error {
public:
    using Error::Error;
};

class ParamOutOfRange : public Error {
public:
    using Error::Error;
};

} // namespace nep
