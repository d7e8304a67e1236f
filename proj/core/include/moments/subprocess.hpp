#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace moments::subprocess {

// Child process with its stdout captured through a pipe. stderr is
// inherited from the parent.
class Child {
 public:
  explicit Child(const std::vector<std::string>& argv);
  ~Child();

  Child(const Child&) = delete;
  Child& operator=(const Child&) = delete;

  // Reads exactly n bytes unless EOF intervenes; returns bytes read.
  std::size_t read_full(void* buf, std::size_t n);

  // Closes the pipe and reaps the child; returns the exit code
  // (-signal for abnormal termination). Idempotent.
  int wait();

 private:
  int fd_ = -1;
  int pid_ = -1;
  int exit_code_ = 0;
  bool waited_ = false;
};

// Runs argv to completion, optionally capturing stdout. Returns exit code.
int run(const std::vector<std::string>& argv, std::string* stdout_capture = nullptr);

}  // namespace moments::subprocess
