#include "output.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include "scenario.hpp"

namespace rte_aot::app
{
CsvWriter::CsvWriter(std::filesystem::path path, std::vector<std::string> header)
    : path_(std::move(path)), columns_(header.size()), file_(std::fopen(path_.c_str(), "wb"), &std::fclose)
{
    if (!file_)
        throw IoError("cannot open " + path_.string() + " for writing");
    std::string line;
    for (std::size_t i = 0; i < header.size(); ++i)
        line += (i ? "," : "") + header[i];
    line += '\n';
    if (std::fputs(line.c_str(), file_.get()) < 0)
        throw IoError("write failed on " + path_.string());
}

void CsvWriter::row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

void CsvWriter::row(std::vector<double> const& values)
{
    if (values.size() != columns_)
        throw std::logic_error("csv row width does not match the header");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (std::fprintf(file_.get(), i ? ",%.12e" : "%.12e", values[i]) < 0)
            throw IoError("write failed on " + path_.string());
    if (std::fputc('\n', file_.get()) == EOF)
        throw IoError("write failed on " + path_.string());
}

void CsvWriter::close()
{
    if (file_ && std::fclose(file_.release()) != 0)
        throw IoError("closing " + path_.string() + " failed");
}

std::string sha256_hex(std::string const& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static char const* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i)
    {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string sha256_file(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return sha256_hex(os.str());
}

StageClock::StageClock() : origin_(clock::now()), begun_(origin_) {}

void StageClock::start(std::string name)
{
    stop();
    current_ = std::move(name);
    begun_ = clock::now();
}

void StageClock::stop()
{
    if (current_.empty())
        return;
    stages_.emplace_back(current_, std::chrono::duration<double>(clock::now() - begun_).count());
    current_.clear();
}

nlohmann::json StageClock::json() const
{
    auto j = nlohmann::json::array();
    for (auto const& [name, secs] : stages_)
        j.push_back({{"stage", name}, {"seconds", secs}});
    return j;
}

double StageClock::total_seconds() const { return std::chrono::duration<double>(clock::now() - origin_).count(); }

void write_json(std::filesystem::path const& path, nlohmann::json const& j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out)
        throw IoError("write failed on " + path.string());
}

}  // namespace rte_aot::app
