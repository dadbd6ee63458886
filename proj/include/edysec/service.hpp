/*
 * Copyright 2026 The edysec Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// HTTP verdict endpoint over one immutable artifact.
//   POST /v1/analyze  {package, features: {column: value}, explain: bool}
//   GET  /v1/health   {status, fingerprint}

#ifndef EDYSEC_SERVICE_HPP_
#define EDYSEC_SERVICE_HPP_

#include <cstdlib>
#include <memory>
#include <string>

#include "edysec/artifact.hpp"
#include "edysec/pipeline.hpp"

#ifndef CPPHTTPLIB_LISTEN_BACKLOG
#define CPPHTTPLIB_LISTEN_BACKLOG 128
#endif
#include "httplib.h"
#include "json.hpp"

namespace edysec {

inline constexpr const char* kArtifactEnv = "EDYSEC_ARTIFACT";
inline constexpr const char* kDefaultArtifactPath = "edysec-out/model.json";

inline std::string DefaultArtifactPath() {
  const char* env = std::getenv(kArtifactEnv);
  return env && *env ? std::string(env) : std::string(kDefaultArtifactPath);
}

struct HttpReply {
  int status = 200;
  std::string body;
};

inline HttpReply ErrorReply(int status, ErrorCode code, const std::string& message) {
  return {status, nlohmann::json{{"error", std::string(ErrorCodeName(code))}, {"message", message}}
                      .dump()};
}

inline int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRequest:
    case ErrorCode::kBadNumeric:
      return 400;
    case ErrorCode::kMissingFeature:
      return 422;
    default:
      return 500;
  }
}

// Pure request handler; safe to call concurrently on a shared artifact.
inline HttpReply HandleAnalyze(const ModelArtifact& artifact, std::string_view body) {
  nlohmann::json request;
  try {
    request = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    return ErrorReply(400, ErrorCode::kMalformedRequest, std::string("unparsable body: ") + e.what());
  }
  try {
    return {200, VerdictJson(PredictRecord(artifact, request)).dump()};
  } catch (const Error& e) {
    return ErrorReply(StatusFor(e.code()), e.code(), e.what());
  } catch (const std::exception& e) {
    return ErrorReply(500, ErrorCode::kInvalidArgument, e.what());
  }
}

inline HttpReply HandleHealth(const std::string& fingerprint) {
  return {200, nlohmann::json{{"status", "ok"}, {"fingerprint", fingerprint}}.dump()};
}

class VerdictServer {
 public:
  explicit VerdictServer(ModelArtifact artifact)
      : artifact_(std::make_shared<const ModelArtifact>(std::move(artifact))),
        fingerprint_(ArtifactFingerprint(*artifact_)) {
    // No SO_REUSEPORT: a second server on a taken port must fail to bind.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    auto model = artifact_;
    server_.Post("/v1/analyze", [model](const httplib::Request& req, httplib::Response& res) {
      const HttpReply reply = HandleAnalyze(*model, req.body);
      res.status = reply.status;
      res.set_content(reply.body, "application/json");
    });
    const std::string fp = fingerprint_;
    server_.Get("/v1/health", [fp](const httplib::Request&, httplib::Response& res) {
      const HttpReply reply = HandleHealth(fp);
      res.status = reply.status;
      res.set_content(reply.body, "application/json");
    });
  }

  const std::string& fingerprint() const { return fingerprint_; }

  // Port 0 picks a free port. Returns the bound port.
  int Bind(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
      bound = server_.bind_to_any_port(host);
      if (bound < 0) bound = 0;
    } else if (!server_.bind_to_port(host, port)) {
      bound = 0;
    }
    if (bound <= 0) {
      throw Error(ErrorCode::kBindFailure,
                  "cannot bind " + host + ":" + std::to_string(port));
    }
    port_ = bound;
    return bound;
  }

  // Blocks until Stop().
  void Serve() { server_.listen_after_bind(); }
  void Stop() { server_.stop(); }
  void WaitUntilReady() { server_.wait_until_ready(); }
  int port() const { return port_; }

 private:
  std::shared_ptr<const ModelArtifact> artifact_;
  std::string fingerprint_;
  httplib::Server server_;
  int port_ = 0;
};

// Splits "host:port"; a bare port binds every interface.
inline std::pair<std::string, int> ParseBind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  std::string host = colon == std::string::npos ? "0.0.0.0" : bind.substr(0, colon);
  const std::string port_text = colon == std::string::npos ? bind : bind.substr(colon + 1);
  int port = -1;
  try {
    std::size_t used = 0;
    port = std::stoi(port_text, &used);
    if (used != port_text.size()) port = -1;
  } catch (const std::exception&) {
    port = -1;
  }
  if (port < 0 || port > 65535 || host.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "bad bind address '" + bind + "'");
  }
  return {host, port};
}

}  // namespace edysec

#endif  // EDYSEC_SERVICE_HPP_
