// Copyright 2026 The ineqforge Authors
//
// Licensed under the Apache License, Version 2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ineqforge/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace ineqforge {

std::vector<std::string> split_command(const std::string& command) {
  std::istringstream in(command);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::string& stdin_data, double timeout_s) {
  if (argv.empty()) throw std::invalid_argument("run_process with empty argv");

  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
    throw std::runtime_error("pipe() failed");
  }

  const auto start = std::chrono::steady_clock::now();
  const pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("fork() failed");

  if (pid == 0) {
    // Child: own process group so a timeout can kill helpers too.
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(out_pipe[1], STDERR_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    std::vector<char*> raw;
    raw.reserve(argv.size() + 1);
    for (const auto& a : argv) raw.push_back(const_cast<char*>(a.c_str()));
    raw.push_back(nullptr);
    execvp(raw[0], raw.data());
    fprintf(stderr, "exec failed: %s: %s\n", raw[0], strerror(errno));
    _exit(127);
  }

  close(in_pipe[0]);
  close(out_pipe[1]);
  fcntl(in_pipe[1], F_SETFL, O_NONBLOCK);
  fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
  signal(SIGPIPE, SIG_IGN);

  ProcessResult result;
  std::size_t written = 0;
  bool stdin_open = true;
  if (stdin_data.empty()) {
    close(in_pipe[1]);
    stdin_open = false;
  }

  const auto deadline =
      start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                  std::chrono::duration<double>(timeout_s));
  char buf[65536];
  bool stdout_open = true;

  while (stdout_open || stdin_open) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      result.timed_out = true;
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      break;
    }
    const int remaining_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now)
            .count());

    struct pollfd fds[2];
    nfds_t nfds = 0;
    int out_slot = -1, in_slot = -1;
    if (stdout_open) {
      out_slot = static_cast<int>(nfds);
      fds[nfds].fd = out_pipe[0];
      fds[nfds].events = POLLIN;
      ++nfds;
    }
    if (stdin_open) {
      in_slot = static_cast<int>(nfds);
      fds[nfds].fd = in_pipe[1];
      fds[nfds].events = POLLOUT;
      ++nfds;
    }
    const int rc = poll(fds, nfds, std::min(remaining_ms + 1, 250));
    if (rc < 0 && errno != EINTR) break;

    if (out_slot >= 0 && (fds[out_slot].revents & (POLLIN | POLLHUP))) {
      const ssize_t got = read(out_pipe[0], buf, sizeof(buf));
      if (got > 0) {
        result.output.append(buf, static_cast<std::size_t>(got));
      } else if (got == 0 || (got < 0 && errno != EAGAIN && errno != EINTR)) {
        stdout_open = false;
      }
    }
    if (in_slot >= 0 && (fds[in_slot].revents & (POLLOUT | POLLERR | POLLHUP))) {
      if (fds[in_slot].revents & (POLLERR | POLLHUP)) {
        close(in_pipe[1]);
        stdin_open = false;
      } else {
        const ssize_t put = write(in_pipe[1], stdin_data.data() + written,
                                  stdin_data.size() - written);
        if (put > 0) {
          written += static_cast<std::size_t>(put);
          if (written == stdin_data.size()) {
            close(in_pipe[1]);
            stdin_open = false;
          }
        } else if (put < 0 && errno != EAGAIN && errno != EINTR) {
          close(in_pipe[1]);
          stdin_open = false;
        }
      }
    }
  }

  if (stdin_open) close(in_pipe[1]);

  // Wait for exit, still honoring the deadline (the child may linger after
  // closing its output).
  int status = 0;
  for (;;) {
    const pid_t reaped = waitpid(pid, &status, WNOHANG);
    if (reaped == pid || reaped < 0) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      result.timed_out = true;
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      break;
    }
    usleep(2000);
  }

  // Drain whatever arrived before the pipe closed (non-blocking; a lingering
  // grandchild must not hang us).
  for (;;) {
    const ssize_t got = read(out_pipe[0], buf, sizeof(buf));
    if (got > 0) {
      result.output.append(buf, static_cast<std::size_t>(got));
    } else {
      break;
    }
  }
  close(out_pipe[0]);
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.exit_code = 128 + WTERMSIG(status);
  }
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace ineqforge
