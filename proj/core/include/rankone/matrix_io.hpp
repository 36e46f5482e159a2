#pragma once

// Text matrix format: header "N n field" (field = real|complex), then N
// whitespace-separated rows. Complex entries are written "re+imj".

#include <iosfwd>
#include <string>
#include <variant>

#include "rankone/frames.hpp"

namespace rankone {

using AnyMatrix = std::variant<RealMatrix, ComplexMatrix>;

AnyMatrix read_matrix(std::istream& in);
AnyMatrix read_matrix_file(const std::string& path);

void write_matrix(std::ostream& out, const RealMatrix& m);
void write_matrix(std::ostream& out, const ComplexMatrix& m);
void write_matrix_file(const std::string& path, const AnyMatrix& m);

Complex parse_complex(const std::string& token);
std::string format_complex(Complex z);

/// {"frame_id": ..., "b": [...], "snr_db": ...}; snr_db omitted when unset.
template <typename Scalar>
std::string measurement_to_json(const MeasurementSet<Scalar>& m);
MeasurementSet<double> measurement_from_json(const std::string& text);

}  // namespace rankone
