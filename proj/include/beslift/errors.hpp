#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace beslift {

// Base class of every recoverable failure raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Validation failures: the caller handed us something outside a contract.
struct InvalidArgument : Error {
  using Error::Error;
};
struct DimensionUnsupported : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};
struct GridTooLarge : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};
struct NonFiniteSample : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};
struct LevelOutOfRange : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};
struct EpsOutOfRange : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};
struct BadAxisSet : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};
struct NotUnimodular : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};
struct DomainMismatch : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};
struct MTooSmall : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};
struct DeltaOutOfRange : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};
struct DivisionByZeroSeminorm : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};
struct SupportViolation : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};
struct CenterOnNode : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};
struct SpecInvalid : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};
struct BadFileFormat : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

// Two adjacent samples are nearly antipodal, so the principal-value phase
// increment across the edge is ill defined.
struct DegenerateEdge : Error {
  std::size_t cell;
  int axis;
  DegenerateEdge(std::size_t cell_, int axis_)
      : Error("degenerate edge at cell " + std::to_string(cell_) + ", axis " +
              std::to_string(axis_)),
        cell(cell_),
        axis(axis_) {}
};

// An internal invariant failed (e.g. a loop sum that must be a multiple of
// 2*pi is not). Indicates a bug, not bad input.
struct InternalError : Error {
  using Error::Error;
};

}  // namespace beslift
