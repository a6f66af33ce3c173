#pragma once

#include <string>
#include <vector>

namespace stopscape {

// Non-fatal diagnostics. Emitted to stderr unless a capture is active on the
// calling thread, in which case they are collected instead.
void warn(std::string message);

class warning_capture {
public:
  warning_capture();
  ~warning_capture();

  warning_capture(warning_capture const&) = delete;
  warning_capture& operator=(warning_capture const&) = delete;

  std::vector<std::string> const& messages() const { return messages_; }

private:
  friend void warn(std::string);
  std::vector<std::string> messages_;
  warning_capture* previous_;
};

}  // namespace stopscape
