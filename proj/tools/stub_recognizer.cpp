// Copyright 2026 The RLSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Reference implementation of the recognizer wire protocol, used by the
// integration tests and as a template for wrapping a real decoder. Reads
// one JSON request per line on stdin ({"id": ..., "wav": ...}) and
// answers one JSON response per line on stdout:
//   {"id": ..., "transcript": ...}  on success
//   {"id": ..., "error": ...}       on failure
//
// Transcript source, by flag:
//   --transcript TEXT   always answer TEXT (default "hello world")
//   --sidecar           answer the contents of <wav>.txt
//   --fail-id ID        answer an error for utterance ID
//   --hang-id ID        never answer for utterance ID (timeout testing)
//   --exit-after N      exit abruptly after N responses

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;

int main(int argc, char** argv) {
  std::string transcript = "hello world";
  std::string fail_id, hang_id;
  bool sidecar = false;
  long exit_after = -1;

  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "stub_recognizer: missing value for " << arg << "\n";
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--transcript") {
      transcript = next();
    } else if (arg == "--sidecar") {
      sidecar = true;
    } else if (arg == "--fail-id") {
      fail_id = next();
    } else if (arg == "--hang-id") {
      hang_id = next();
    } else if (arg == "--exit-after") {
      exit_after = std::stol(next());
    } else {
      std::cerr << "stub_recognizer: unknown flag " << arg << "\n";
      return 2;
    }
  }

  std::string line;
  long answered = 0;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    json response;
    std::string id;
    try {
      const json request = json::parse(line);
      id = request.at("id").get<std::string>();
      const std::string wav = request.at("wav").get<std::string>();

      if (id == hang_id) {
        // Swallow the request without answering.
        continue;
      }
      if (id == fail_id) {
        response = {{"id", id}, {"error", "injected failure"}};
      } else if (sidecar) {
        std::ifstream ref(wav + ".txt");
        if (!ref) {
          response = {{"id", id}, {"error", "no sidecar transcript for " + wav}};
        } else {
          std::stringstream buf;
          buf << ref.rdbuf();
          std::string text = buf.str();
          while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
          response = {{"id", id}, {"transcript", text}};
        }
      } else {
        response = {{"id", id}, {"transcript", transcript}};
      }
    } catch (const json::exception& e) {
      response = {{"id", id}, {"error", std::string("bad request: ") + e.what()}};
    }
    std::cout << response.dump() << "\n" << std::flush;
    ++answered;
    if (exit_after >= 0 && answered >= exit_after) return 0;
  }
  return 0;
}
