#pragma once

#include "band_noise_free.hpp"
#include "harness.hpp"

#include <string>

namespace pwband {

// CSV with header x,lower,upper,empty. Doubles print as %.17g so finite
// values and +-inf round-trip exactly; empty rows carry lower=1, upper=-1.
std::string band_to_csv(const Band& band);

// Meta + effective configuration. timestamp goes into the single
// "generated_at" field; pass an empty string to omit it (byte-comparison
// tests do). Non-finite numbers serialize as null.
std::string band_to_json(const Band& band, const std::string& timestamp);

std::string coverage_report_to_json(const CoverageReport& report, const std::string& timestamp);

// ISO 8601 UTC, seconds resolution.
std::string now_utc();

// Header must be exactly x,y. Open failures throw io_error; malformed
// content throws invalid_argument.
Dataset read_xy_csv(const std::string& path);

void write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace pwband
