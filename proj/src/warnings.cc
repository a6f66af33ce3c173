#include "stopscape/warnings.h"

#include <iostream>

namespace stopscape {

namespace {
thread_local warning_capture* active_capture = nullptr;
}  // namespace

warning_capture::warning_capture() : previous_{active_capture} {
  active_capture = this;
}

warning_capture::~warning_capture() { active_capture = previous_; }

void warn(std::string message) {
  if (active_capture != nullptr) {
    active_capture->messages_.emplace_back(std::move(message));
  } else {
    std::clog << "warning: " << message << '\n';
  }
}

}  // namespace stopscape
