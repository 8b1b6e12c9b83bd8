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

#ifndef DIVREC_HTTP_SERVER_H_
#define DIVREC_HTTP_SERVER_H_

#include <memory>
#include <string>

#include "divrec/service.h"

namespace divrec {

// JSON-over-HTTP binding of RecommenderService.
//
//   POST /session  {user_id}                -> {token, arm, level, info_message}
//   POST /ack      {token}
//   GET  /home?token=T                      -> {arm, top_picks, broad?, level?}
//   GET  /broad?token=T&page=P              -> RecPage
//   POST /level    {token, level}           -> {level, page}
//   POST /rating   {token, movie_id, rating}
//   POST /wishlist {token, movie_id}        -> {added}
//   POST /event    {token, kind, movie_id?}
//   POST /logout   {token}
//   GET  /healthz
//
// GET endpoints also accept "Authorization: Bearer T". Errors come back as
// {"error": message} with the ServiceError status.
class HttpServer {
 public:
  explicit HttpServer(RecommenderService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Blocks until Stop().
  bool Listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it; follow with ListenAfterBind().
  int BindToAnyPort(const std::string& host);
  bool ListenAfterBind();
  void Stop();
  void WaitUntilReady() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace divrec

#endif  // DIVREC_HTTP_SERVER_H_
