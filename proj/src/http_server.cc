// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "divrec/http_server.h"

#include <httplib.h>

#include <json.hpp>

namespace divrec {
namespace {

using nlohmann::json;

json ArmJson(const Arm& arm) {
  return {{"cohort", CohortName(arm.cohort)}, {"treatment", TreatmentName(arm.treatment)}};
}

json PageJson(const RecPage& page) {
  json slots = json::array();
  for (const auto& s : page.slots) {
    slots.push_back({{"movie_id", s.movie_id}, {"score", s.score}, {"cluster_id", s.cluster_id}});
  }
  return {{"page", page.page_index}, {"degraded", page.degraded}, {"slots", slots}};
}

std::string TokenOf(const httplib::Request& req) {
  if (req.has_param("token")) return req.get_param_value("token");
  const std::string auth = req.get_header_value("Authorization");
  constexpr std::string_view kBearer = "Bearer ";
  if (auth.rfind(kBearer, 0) == 0) return auth.substr(kBearer.size());
  throw ServiceError(401, "missing session token");
}

json Body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception&) {
    throw ServiceError(400, "request body is not valid JSON");
  }
}

template <typename T>
T Field(const json& body, const char* name) {
  auto it = body.find(name);
  if (it == body.end()) throw ServiceError(400, std::string("missing field '") + name + "'");
  try {
    return it->template get<T>();
  } catch (const json::exception&) {
    throw ServiceError(400, std::string("field '") + name + "' has the wrong type");
  }
}

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// Runs `fn` and maps exceptions to JSON errors.
template <typename Fn>
httplib::Server::Handler Wrap(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      Reply(res, 200, fn(req));
    } catch (const ServiceError& e) {
      Reply(res, e.status(), {{"error", e.what()}});
    } catch (const std::out_of_range& e) {
      Reply(res, 400, {{"error", e.what()}});
    } catch (const std::invalid_argument& e) {
      Reply(res, 400, {{"error", e.what()}});
    } catch (const std::exception& e) {
      Reply(res, 500, {{"error", e.what()}});
    }
  };
}

}  // namespace

struct HttpServer::Impl {
  explicit Impl(RecommenderService& s) : service(s) {}
  RecommenderService& service;
  httplib::Server server;
};

HttpServer::HttpServer(RecommenderService& service)
    : impl_(std::make_unique<Impl>(service)) {
  auto& svc = impl_->service;
  auto& srv = impl_->server;

  srv.Get("/healthz", Wrap([](const httplib::Request&) { return json{{"ok", true}}; }));

  srv.Post("/session", Wrap([&svc](const httplib::Request& req) {
             const json body = Body(req);
             const SessionStart s = svc.StartSession(Field<UserId>(body, "user_id"));
             return json{{"token", s.token},
                         {"arm", ArmJson(s.arm)},
                         {"level", s.level},
                         {"info_message", s.info_message ? json(*s.info_message) : json()}};
           }));

  srv.Post("/ack", Wrap([&svc](const httplib::Request& req) {
             svc.Acknowledge(Field<std::string>(Body(req), "token"));
             return json{{"ok", true}};
           }));

  srv.Get("/home", Wrap([&svc](const httplib::Request& req) {
            const HomeView v = svc.Home(TokenOf(req));
            json picks = json::array();
            for (const auto& c : v.top_picks) {
              picks.push_back({{"movie_id", c.movie_id}, {"score", c.score}});
            }
            json out{{"arm", ArmJson(v.arm)}, {"top_picks", picks}, {"fallback", v.fallback}};
            if (v.broad) out["broad"] = PageJson(*v.broad);
            if (v.level) out["level"] = *v.level;
            return out;
          }));

  srv.Get("/broad", Wrap([&svc](const httplib::Request& req) {
            int page = 1;
            if (req.has_param("page")) {
              try {
                page = std::stoi(req.get_param_value("page"));
              } catch (const std::exception&) {
                throw ServiceError(400, "page must be an integer");
              }
            }
            return PageJson(svc.Broad(TokenOf(req), page));
          }));

  srv.Post("/level", Wrap([&svc](const httplib::Request& req) {
             const json body = Body(req);
             const LevelChange c =
                 svc.SetLevel(Field<std::string>(body, "token"), Field<int>(body, "level"));
             return json{{"level", c.level}, {"page", PageJson(c.page)}};
           }));

  srv.Post("/rating", Wrap([&svc](const httplib::Request& req) {
             const json body = Body(req);
             svc.Rate(Field<std::string>(body, "token"), Field<MovieId>(body, "movie_id"),
                      Field<double>(body, "rating"));
             return json{{"ok", true}};
           }));

  srv.Post("/wishlist", Wrap([&svc](const httplib::Request& req) {
             const json body = Body(req);
             const bool added = svc.AddToWishlist(Field<std::string>(body, "token"),
                                                  Field<MovieId>(body, "movie_id"));
             return json{{"added", added}};
           }));

  srv.Post("/event", Wrap([&svc](const httplib::Request& req) {
             const json body = Body(req);
             EventKind kind;
             try {
               kind = ParseEventKind(Field<std::string>(body, "kind"));
             } catch (const std::exception& e) {
               throw ServiceError(400, e.what());
             }
             std::optional<MovieId> movie;
             if (body.contains("movie_id")) movie = Field<MovieId>(body, "movie_id");
             svc.RecordEvent(Field<std::string>(body, "token"), kind, movie);
             return json{{"ok", true}};
           }));

  srv.Post("/logout", Wrap([&svc](const httplib::Request& req) {
             svc.Logout(Field<std::string>(Body(req), "token"));
             return json{{"ok", true}};
           }));
}

HttpServer::~HttpServer() { Stop(); }

bool HttpServer::Listen(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

int HttpServer::BindToAnyPort(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool HttpServer::ListenAfterBind() { return impl_->server.listen_after_bind(); }

void HttpServer::Stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::WaitUntilReady() const { impl_->server.wait_until_ready(); }

}  // namespace divrec
