// SPDX-License-Identifier: Apache-2.0
#include <httplib.h>

#include <hunkscope/api_service.hpp>
#include <hunkscope/error.hpp>

#include <sys/socket.h>

namespace hunkscope {

struct HttpServer::Impl {
    ApiService& service;
    std::string cors_origin;
    httplib::Server server;
    std::thread thread;

    Impl(ApiService& s, std::string origin)
        : service(s)
        , cors_origin(std::move(origin))
    {
    }
};

HttpServer::HttpServer(ApiService& service, std::string cors_origin)
    : m_impl(std::make_unique<Impl>(service, std::move(cors_origin)))
{
    auto& server = m_impl->server;
    // SO_REUSEADDR only: a second server on a busy port must fail to bind.
    server.set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });

    auto* impl = m_impl.get();
    auto cors = [impl](httplib::Response& res) {
        if (!impl->cors_origin.empty()) {
            res.set_header("Access-Control-Allow-Origin", impl->cors_origin);
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
        }
    };
    auto forward = [impl, cors](const httplib::Request& req, httplib::Response& res) {
        ApiRequest request;
        request.method = req.method;
        request.path = req.path;
        request.body = req.body;
        for (const auto& [key, value] : req.params)
            request.query.emplace(key, value);
        auto response = impl->service.handle(request);
        res.status = response.status;
        res.set_content(response.body, "application/json");
        cors(res);
    };
    server.Get(".*", forward);
    server.Post(".*", forward);
    server.Options(".*", [cors](const httplib::Request&, httplib::Response& res) {
        res.status = 204;
        cors(res);
    });
}

HttpServer::~HttpServer()
{
    stop();
}

int HttpServer::start(const std::string& host, int port)
{
    auto& server = m_impl->server;
    int bound = port;
    if (port == 0) {
        bound = server.bind_to_any_port(host);
        if (bound < 0)
            throw Error(ErrorCode::BindError, "cannot bind " + host + " on an ephemeral port");
    } else if (!server.bind_to_port(host, port)) {
        throw Error(ErrorCode::BindError, "cannot bind " + host + ":" + std::to_string(port));
    }
    m_impl->thread = std::thread([&server] { server.listen_after_bind(); });
    server.wait_until_ready();
    return bound;
}

void HttpServer::stop()
{
    if (!m_impl)
        return;
    m_impl->server.stop();
    if (m_impl->thread.joinable())
        m_impl->thread.join();
}

bool HttpServer::running() const
{
    return m_impl && m_impl->server.is_running();
}

} // namespace hunkscope
