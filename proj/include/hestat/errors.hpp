/* Copyright (C) 2026 The hestat authors.
 * Licensed under the Apache License, Version 2.0; see the LICENSE file.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace hestat {

/// Base class of every error thrown by this library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Emulator errors.
struct too_many_values : error { using error::error; };
struct level_exhausted : error { using error::error; };
struct length_mismatch : error { using error::error; };
struct dirty_padding : error { using error::error; };

// Approximation / primitive errors.
struct non_finite_target : error { using error::error; };
struct domain_violation : error { using error::error; };
struct divergence : error { using error::error; };

// Statistics errors.
struct empty_column : error { using error::error; };
struct degenerate_variance : error { using error::error; };
struct near_zero_mean : error { using error::error; };

// Data pipeline errors.
struct io_error : error { using error::error; };
struct missing_column : error { using error::error; };
struct unparsable_cell : error { using error::error; };
struct non_finite_value : error { using error::error; };
struct zero_reference : error { using error::error; };

}  // namespace hestat
