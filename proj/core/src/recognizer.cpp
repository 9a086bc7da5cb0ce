// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "rlse/recognizer.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "rlse/csv.hpp"
#include "rlse/error.hpp"
#include "rlse/metrics.hpp"

namespace rlse {

namespace {

using json = nlohmann::json;

Eigen::MatrixXd mps_of(const Waveform& w, const MockParams& p) {
  const auto spec = stft(w, p.stft);
  const auto fb = make_mel_filterbank(p.n_mels, p.stft.bins(), p.sample_rate);
  return mel_power(spec, fb);
}

}  // namespace

double mock_error_rate(const Waveform& enhanced, const Waveform& clean_ref,
                       const MockParams& params) {
  if (!(params.lsd_cal > 0.0)) throw DataError("mock_error_rate: lsd_cal must be positive");

  double clean_power = 0.0;
  for (const double s : clean_ref.samples) clean_power += s * s;
  if (clean_ref.samples.empty() || clean_power / static_cast<double>(clean_ref.samples.size()) < 1e-10) {
    throw DataError("mock_error_rate: all-silence reference");
  }

  const size_t n = std::min(enhanced.samples.size(), clean_ref.samples.size());
  Waveform e{std::vector<double>(enhanced.samples.begin(), enhanced.samples.begin() + n),
             enhanced.sample_rate};
  Waveform c{std::vector<double>(clean_ref.samples.begin(), clean_ref.samples.begin() + n),
             clean_ref.sample_rate};

  const double lsd = log_spectral_distance(mps_of(e, params), mps_of(c, params));
  const double rate = lsd / params.lsd_cal;
  return rate < 0.0 ? 0.0 : (rate > 1.0 ? 1.0 : rate);
}

const Waveform& MockRecognizer::clean_for(const std::filesystem::path& path) {
  const std::string key = path.string();
  auto it = clean_cache_.find(key);
  if (it == clean_cache_.end()) {
    it = clean_cache_.emplace(key, read_wav(path, params_.sample_rate)).first;
  }
  return it->second;
}

Transcript MockRecognizer::recognize(const std::string& utterance_id,
                                     const std::filesystem::path& wav_path) {
  if (!std::filesystem::exists(wav_path)) {
    throw RecognizerError("mock recognize [" + utterance_id + "]: missing file " +
                          wav_path.string());
  }
  const Waveform w = read_wav(wav_path, params_.sample_rate);
  const Eigen::MatrixXd mps = mps_of(w, params_);
  Transcript t;
  t.text.reserve(static_cast<size_t>(mps.rows()));
  for (Eigen::Index r = 0; r < mps.rows(); ++r) {
    Eigen::Index band;
    mps.row(r).maxCoeff(&band);
    t.text.push_back(static_cast<char>('a' + band % 26));
  }
  return t;
}

double MockRecognizer::score(const std::string& utterance_id, const Waveform& audio,
                             const Reference& ref) {
  if (ref.clean_wav.empty()) {
    throw RecognizerError("mock score [" + utterance_id + "]: reference has no clean waveform");
  }
  return mock_error_rate(audio, clean_for(ref.clean_wav), params_);
}

ExternalRecognizer::ExternalRecognizer(std::string command, double timeout_seconds,
                                       std::filesystem::path scratch_dir)
    : command_(std::move(command)),
      timeout_seconds_(timeout_seconds),
      scratch_dir_(std::move(scratch_dir)) {
  if (command_.empty()) throw DataError("ExternalRecognizer: empty command");
  if (!(timeout_seconds_ > 0.0)) throw DataError("ExternalRecognizer: timeout must be positive");
  // Writes to a crashed child must surface as EPIPE, not kill the process.
  signal(SIGPIPE, SIG_IGN);
}

ExternalRecognizer::~ExternalRecognizer() { shutdown(); }

void ExternalRecognizer::spawn() {
  int to_child[2], from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0) {
    throw RecognizerError("cannot create pipes for recognizer process");
  }
  const int pid = fork();
  if (pid < 0) throw RecognizerError("cannot fork recognizer process");
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  pid_ = pid;
  to_child_ = to_child[1];
  from_child_ = from_child[0];
  read_buffer_.clear();
}

void ExternalRecognizer::shutdown() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    // Give the child a moment to exit after stdin closes, then kill.
    int status = 0;
    for (int i = 0; i < 20; ++i) {
      if (waitpid(pid_, &status, WNOHANG) != 0) {
        pid_ = -1;
        return;
      }
      usleep(100 * 1000);
    }
    kill(pid_, SIGKILL);
    waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

std::string ExternalRecognizer::exchange(const std::string& utterance_id,
                                         const std::string& request_line) {
  // A child found dead at request time (stale from an earlier batch) is
  // respawned and the request retried once. Timeouts and mid-response
  // deaths are not retried.
  for (int attempt = 0;; ++attempt) {
    if (pid_ < 0) spawn();

    bool write_failed = false;
    size_t written = 0;
    while (written < request_line.size()) {
      const ssize_t n = write(to_child_, request_line.data() + written,
                              request_line.size() - written);
      if (n <= 0) {
        write_failed = true;
        break;
      }
      written += static_cast<size_t>(n);
    }
    if (write_failed) {
      shutdown();
      if (attempt == 0) continue;
      throw RecognizerError("recognizer [" + utterance_id + "]: child closed stdin pipe");
    }

    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration<double>(timeout_seconds_);
    bool received_any = !read_buffer_.empty();
    for (;;) {
      const auto nl = read_buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = read_buffer_.substr(0, nl);
        read_buffer_.erase(0, nl + 1);
        return line;
      }
      const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (remaining.count() <= 0) {
        shutdown();
        throw RecognizerError("recognizer [" + utterance_id + "]: timeout after " +
                              std::to_string(timeout_seconds_) + " s");
      }
      struct pollfd pfd{from_child_, POLLIN, 0};
      const int pr = poll(&pfd, 1, static_cast<int>(remaining.count()));
      if (pr < 0) {
        shutdown();
        throw RecognizerError("recognizer [" + utterance_id + "]: poll failed");
      }
      if (pr == 0) continue;
      char buf[4096];
      const ssize_t n = read(from_child_, buf, sizeof buf);
      if (n <= 0) {
        shutdown();
        if (!received_any && attempt == 0) break;  // dead on arrival, retry once
        throw RecognizerError("recognizer [" + utterance_id + "]: child exited mid-request");
      }
      received_any = true;
      read_buffer_.append(buf, static_cast<size_t>(n));
    }
  }
}

Transcript ExternalRecognizer::recognize(const std::string& utterance_id,
                                         const std::filesystem::path& wav_path) {
  if (!std::filesystem::exists(wav_path)) {
    throw RecognizerError("recognizer [" + utterance_id + "]: missing file " + wav_path.string());
  }
  json request;
  request["id"] = utterance_id;
  request["wav"] = std::filesystem::absolute(wav_path).string();
  const std::string reply = exchange(utterance_id, request.dump() + "\n");

  json response;
  try {
    response = json::parse(reply);
  } catch (const json::exception& e) {
    throw RecognizerError("recognizer [" + utterance_id + "]: malformed response: " + reply);
  }
  if (!response.contains("id") || response["id"] != utterance_id) {
    throw RecognizerError("recognizer [" + utterance_id + "]: response id mismatch: " + reply);
  }
  if (response.contains("error")) {
    throw RecognizerError("recognizer [" + utterance_id +
                          "]: decoder error: " + response["error"].get<std::string>());
  }
  if (!response.contains("transcript") || !response["transcript"].is_string()) {
    throw RecognizerError("recognizer [" + utterance_id + "]: response lacks transcript: " + reply);
  }
  return Transcript{response["transcript"].get<std::string>()};
}

double ExternalRecognizer::score(const std::string& utterance_id, const Waveform& audio,
                                 const Reference& ref) {
  if (ref.transcript.empty()) {
    throw RecognizerError("recognizer [" + utterance_id + "]: reference transcript is empty");
  }
  std::filesystem::path dir = scratch_dir_;
  if (dir.empty()) dir = std::filesystem::temp_directory_path();
  std::filesystem::create_directories(dir);
  const auto wav_path = dir / (utterance_id + ".score.wav");
  write_wav(wav_path, audio);
  const Transcript hyp = recognize(utterance_id, wav_path);
  return cer(hyp, Transcript{ref.transcript});
}

std::unique_ptr<Recognizer> make_recognizer(const RecognizerEndpoint& endpoint) {
  switch (endpoint.kind) {
    case RecognizerEndpoint::Kind::kMock:
      return std::make_unique<MockRecognizer>(endpoint.mock);
    case RecognizerEndpoint::Kind::kExternal:
      return std::make_unique<ExternalRecognizer>(endpoint.command, endpoint.timeout_seconds,
                                                  endpoint.scratch_dir);
  }
  throw Error("make_recognizer: unknown endpoint kind");
}

BatchResult batch_recognize(Recognizer& recognizer, const std::vector<BatchEntry>& entries) {
  BatchResult result;
  for (const auto& entry : entries) {
    try {
      const Waveform audio = read_wav(entry.wav);
      result.error_rates[entry.id] = recognizer.score(entry.id, audio, entry.ref);
    } catch (const Error& e) {
      result.failures[entry.id] = e.what();
    }
  }
  return result;
}

std::vector<BatchEntry> load_recognizer_manifest(const std::filesystem::path& path,
                                                 RecognizerEndpoint::Kind kind) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open recognizer manifest: " + path.string());
  const auto base = path.parent_path();

  std::vector<BatchEntry> entries;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto fields = csv_split(line);
    if (!header_seen) {
      header_seen = true;
      if (!fields.empty() && fields[0] == "id") continue;  // optional header row
    }
    if (fields.size() != 3) {
      throw DataError("recognizer manifest row needs 3 columns: " + line);
    }
    BatchEntry entry;
    entry.id = fields[0];
    entry.wav = base / fields[1];
    if (kind == RecognizerEndpoint::Kind::kMock) {
      entry.ref.clean_wav = base / fields[2];
    } else {
      entry.ref.transcript = fields[2];
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace rlse
