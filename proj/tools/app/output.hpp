#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rte_aot::app
{
//! CSV with a fixed header; every value printed with %.12e.
class CsvWriter
{
  public:
    CsvWriter(std::filesystem::path path, std::vector<std::string> header);

    void row(std::initializer_list<double> values);
    void row(std::vector<double> const& values);
    void close();

  private:
    std::filesystem::path path_;
    std::size_t columns_;
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> file_;
};

std::string sha256_hex(std::string const& bytes);
std::string sha256_file(std::filesystem::path const& path);

//! Wall-clock timer for named stages.
class StageClock
{
  public:
    StageClock();
    void start(std::string name);
    void stop();
    nlohmann::json json() const;
    double total_seconds() const;

  private:
    using clock = std::chrono::steady_clock;
    clock::time_point origin_;
    clock::time_point begun_;
    std::string current_;
    std::vector<std::pair<std::string, double>> stages_;
};

//! Writes pretty JSON; raises IoError on failure.
void write_json(std::filesystem::path const& path, nlohmann::json const& j);

}  // namespace rte_aot::app
