#pragma once

#include <stdexcept>
#include <string>

namespace toporec {

// Base for all domain errors raised by the pipeline. CLI maps these to
// exit code 2 (data error); anything else is an internal failure.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnreadableImage : Error {
  explicit UnreadableImage(const std::string& what) : Error("unreadable image: " + what) {}
};

struct EmptyMask : Error {
  explicit EmptyMask(const std::string& what) : Error("empty mask: " + what) {}
};

struct NonSquareInput : Error {
  explicit NonSquareInput(const std::string& what) : Error("non-square input: " + what) {}
};

struct EmptyDataset : Error {
  explicit EmptyDataset(const std::string& what) : Error("empty dataset: " + what) {}
};

struct ClassWithNoImages : Error {
  explicit ClassWithNoImages(const std::string& what) : Error("class with no images: " + what) {}
};

struct DegenerateRange : Error {
  explicit DegenerateRange(const std::string& what) : Error("degenerate range: " + what) {}
};

struct WrongDirectionCount : Error {
  explicit WrongDirectionCount(const std::string& what) : Error("wrong direction count: " + what) {}
};

struct AllZeroStack : Error {
  explicit AllZeroStack(const std::string& what) : Error("all-zero stack: " + what) {}
};

struct ShapeMismatch : Error {
  explicit ShapeMismatch(const std::string& what) : Error("shape mismatch: " + what) {}
};

struct DimMismatch : Error {
  explicit DimMismatch(const std::string& what) : Error("dimension mismatch: " + what) {}
};

struct NonFiniteLoss : Error {
  explicit NonFiniteLoss(const std::string& what) : Error("non-finite loss: " + what) {}
};

struct LengthMismatch : Error {
  explicit LengthMismatch(const std::string& what) : Error("length mismatch: " + what) {}
};

}  // namespace toporec
