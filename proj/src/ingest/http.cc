#include "httplib.h"

#include "stopscape/error.h"
#include "stopscape/ingest/feed.h"

namespace stopscape {

namespace {

struct split_url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

split_url split(std::string const& url) {
  auto const scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ingest_error{"invalid URL (no scheme): " + url, false};
  }
  auto const path_begin = url.find('/', scheme_end + 3);
  if (path_begin == std::string::npos) {
    return {url, "/"};
  }
  return {url.substr(0, path_begin), url.substr(path_begin)};
}

}  // namespace

std::string http_get(std::string const& url, http_options const& opt) {
  auto const [origin, path] = split(url);
  httplib::Client client{origin};
  if (!client.is_valid()) {
    throw ingest_error{"unsupported URL: " + url, false};
  }
  client.set_connection_timeout(opt.timeout);
  client.set_read_timeout(opt.timeout);
  client.set_follow_location(true);

  httplib::Headers headers;
  if (opt.api_key.has_value()) {
    headers.emplace("Authorization", *opt.api_key);
  }
  auto const res = client.Get(path, headers);
  if (!res) {
    throw ingest_error{"GET " + url + " failed: " +
                           httplib::to_string(res.error()),
                       true};
  }
  if (res->status >= 500) {
    throw ingest_error{
        "GET " + url + " returned HTTP " + std::to_string(res->status), true};
  }
  if (res->status < 200 || res->status >= 300) {
    throw ingest_error{
        "GET " + url + " returned HTTP " + std::to_string(res->status), false};
  }
  return res->body;
}

}  // namespace stopscape
