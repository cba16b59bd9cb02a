#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cheshire {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Factor labels collide, are missing, or two signatures disagree.
class SignatureError : public Error {
   public:
    using Error::Error;
};

/// Malformed numeric input: wrong shape, non-finite entries, out-of-range parameters.
class ValueError : public Error {
   public:
    using Error::Error;
};

/// Pre- and post-selected states are (numerically) orthogonal.
class DegeneratePostselection : public Error {
   public:
    DegeneratePostselection(double overlap_modulus, const std::string &what)
        : Error(what), overlap_modulus_(overlap_modulus) {
    }
    double overlap_modulus() const noexcept {
        return overlap_modulus_;
    }

   private:
    double overlap_modulus_;
};

/// Post-selection removed the whole state.
class AnnihilatedState : public Error {
   public:
    using Error::Error;
};

/// The log-amplitude fit has too few informative grid points.
class IllConditionedFit : public Error {
   public:
    using Error::Error;
};

/// Receives non-fatal diagnostics (truncation guards, regime violations).
using WarningSink = std::function<void(std::string_view)>;

/// Replaces the process-wide warning sink; returns the previous one. The default writes to stderr.
WarningSink set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace cheshire
