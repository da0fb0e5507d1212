/* Copyright (C) 2026 The hestat authors.
 * Licensed under the Apache License, Version 2.0; see the LICENSE file.
 */
#pragma once

#include "hestat/chebyshev.hpp"
#include "hestat/ckks.hpp"
#include "hestat/column.hpp"
#include "hestat/data.hpp"
#include "hestat/errors.hpp"
#include "hestat/plain.hpp"
#include "hestat/primitives.hpp"
#include "hestat/report.hpp"
#include "hestat/stats.hpp"
