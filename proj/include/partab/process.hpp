#pragma once

#include <sys/types.h>
#include <sys/wait.h>
#include <signal.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fcntl.h>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "partab/jobs.hpp"
#include "partab/partition.hpp"

namespace partab {

/// One checker process per job, glued together by the JOB_NO environment
/// variable and the 0/5/1 exit-code protocol.  Bit-compatible with driving
/// the checker from a shell: any binary that honors the protocol can stand
/// in for the bundled one.
class ProcessOrchestrator {
 public:
  /// binary is invoked as: binary solve -l <formula> [extra args...]
  ProcessOrchestrator(std::string binary, std::string formula,
                      std::vector<std::string> extra_args = {})
      : binary_(std::move(binary)), formula_(std::move(formula)),
        extra_args_(std::move(extra_args)) {}

  struct Result {
    OrchestrationOutcome outcome = OrchestrationOutcome::Error;
    std::uint32_t winning_job = 0;
    std::vector<int> exit_codes;    // indexed by job number - 1; -1 if never ran
    std::string winner_output;      // stdout of the deciding satisfiable job
  };

  Result run(std::uint32_t n, std::uint32_t split_depth, std::uint32_t workers,
             std::ostream* report = nullptr) {
    if (workers < 1) workers = 1;
    Result result;
    result.exit_codes.assign(n, -1);

    char tmpl[] = "/tmp/partab-jobs-XXXXXX";
    if (!mkdtemp(tmpl)) throw std::runtime_error("mkdtemp failed");
    std::string dir = tmpl;

    std::map<pid_t, std::uint32_t> running;
    std::uint32_t next = 1;
    bool sat = false;
    std::uint32_t unsat_votes = 0;

    auto spawn_until_full = [&] {
      while (!sat && next <= n && running.size() < workers) {
        JobSpec spec{next, n, split_depth};
        pid_t pid = spawn(spec, out_path(dir, next));
        running.emplace(pid, next);
        ++next;
      }
    };

    spawn_until_full();
    while (!running.empty()) {
      int status = 0;
      pid_t pid = waitpid(-1, &status, 0);
      if (pid < 0) throw std::runtime_error("waitpid failed");
      auto it = running.find(pid);
      if (it == running.end()) continue;
      std::uint32_t job = it->second;
      running.erase(it);

      int code = WIFEXITED(status) ? WEXITSTATUS(status) : kExitError;
      result.exit_codes[job - 1] = code;
      if (code == kExitSat && !sat) {
        sat = true;
        result.winning_job = job;
        result.winner_output = slurp(out_path(dir, job));
        for (auto& [other_pid, other_job] : running) kill(other_pid, SIGTERM);
      } else if (code == kExitUnsat) {
        ++unsat_votes;
      }
      spawn_until_full();
    }

    cleanup(dir, n);
    if (sat) {
      result.outcome = OrchestrationOutcome::Satisfiable;
      if (report) *report << kVoteSat << '\n';
    } else if (unsat_votes == n) {
      result.outcome = OrchestrationOutcome::Unsatisfiable;
      if (report) *report << kVoteUnsat << '\n';
    } else {
      result.outcome = OrchestrationOutcome::Error;
    }
    return result;
  }

 private:
  static std::string out_path(const std::string& dir, std::uint32_t job) {
    return dir + "/job." + std::to_string(job) + ".out";
  }

  pid_t spawn(const JobSpec& spec, const std::string& out_file) {
    pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid > 0) return pid;

    // Child: route stdout to the job's output file, set JOB_NO, exec.
    int fd = open(out_file.c_str(), O_CREAT | O_WRONLY | O_TRUNC, 0644);
    if (fd >= 0) {
      dup2(fd, STDOUT_FILENO);
      close(fd);
    }
    setenv("JOB_NO", format_job_env(spec).c_str(), 1);
    std::vector<std::string> args{binary_, "solve", "-l", formula_};
    args.insert(args.end(), extra_args_.begin(), extra_args_.end());
    std::vector<char*> argv;
    argv.reserve(args.size() + 1);
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    execv(binary_.c_str(), argv.data());
    _exit(127);
  }

  static std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
  }

  static void cleanup(const std::string& dir, std::uint32_t n) {
    for (std::uint32_t j = 1; j <= n; ++j) std::remove(out_path(dir, j).c_str());
    rmdir(dir.c_str());
  }

  std::string binary_;
  std::string formula_;
  std::vector<std::string> extra_args_;
};

}  // namespace partab
