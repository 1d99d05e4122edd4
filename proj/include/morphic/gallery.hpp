#pragma once

// Built-in example models, each with the command it is meant to exercise.

#include <string>
#include <string_view>
#include <vector>

namespace morphic {

struct GalleryEntry {
    std::string name;
    std::string command;
    std::string description;
    std::string model;  // JSON text
};

const std::vector<GalleryEntry>& gallery();
const GalleryEntry* find_gallery(std::string_view name);

}  // namespace morphic
