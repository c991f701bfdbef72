// SPDX-License-Identifier: Apache-2.0
#include <httplib.h>

#include <hunkscope/snapshot_fetcher.hpp>

#include <algorithm>
#include <cctype>

namespace hunkscope {

namespace {

class HttpsTransport : public Transport {
public:
    HttpResponse get(const HttpRequest& request) override
    {
        HttpResponse response;
        auto scheme_end = request.url.find("://");
        if (scheme_end == std::string::npos) {
            response.error = "not an absolute URL: " + request.url;
            return response;
        }
        auto path_begin = request.url.find('/', scheme_end + 3);
        auto origin = request.url.substr(0, path_begin);
        auto target = path_begin == std::string::npos ? std::string("/") : request.url.substr(path_begin);

        httplib::Client client(origin);
        client.set_follow_location(true);
        client.set_connection_timeout(10);
        client.set_read_timeout(30);

        httplib::Headers headers;
        for (const auto& [name, value] : request.headers)
            headers.emplace(name, value);

        auto result = client.Get(target, headers);
        if (!result) {
            response.error = httplib::to_string(result.error());
            return response;
        }
        response.status = result->status;
        response.body = result->body;
        for (const auto& [name, value] : result->headers) {
            std::string lowered = name;
            std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            response.headers[lowered] = value;
        }
        return response;
    }
};

} // namespace

std::unique_ptr<Transport> make_https_transport()
{
    return std::make_unique<HttpsTransport>();
}

} // namespace hunkscope
