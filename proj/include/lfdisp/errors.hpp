#pragma once

#include <stdexcept>
#include <string>

namespace lfdisp {

// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- light field / file I/O ---

class MissingView : public Error {
 public:
  explicit MissingView(int view_index)
      : Error("missing view index " + std::to_string(view_index)),
        index(view_index) {}
  int index;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class BadConfig : public Error {
 public:
  using Error::Error;
};

class BadHeader : public Error {
 public:
  using Error::Error;
};

class TruncatedPayload : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// --- geometry ---

class NonPositiveDepth : public Error {
 public:
  using Error::Error;
};

// disparity == 1 puts the scene point at infinite depth
class UnitDisparity : public Error {
 public:
  using Error::Error;
};

// --- entropy ---

class EmptyHistogram : public Error {
 public:
  using Error::Error;
};

class EmptyWindow : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

// --- regions ---

class InsufficientInitialDisparity : public Error {
 public:
  using Error::Error;
};

// --- windows ---

class BadSide : public Error {
 public:
  using Error::Error;
};

// --- matching ---

class NoValidSamples : public Error {
 public:
  using Error::Error;
};

// --- synthesis ---

class BadSpec : public Error {
 public:
  using Error::Error;
};

// --- metrics ---

class EmptyMask : public Error {
 public:
  using Error::Error;
};

class RowOutOfBounds : public Error {
 public:
  using Error::Error;
};

}  // namespace lfdisp
