// Copyright 2026 The semoctree Authors
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

// Writes the synthetic street scene as a world file and a point cloud.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "semoctree/synthetic.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Synthetic semantic point cloud"};
    std::string cloud_path;
    std::string world_path;
    semoctree::synthetic::Options opts;
    app.add_option("--cloud", cloud_path, "Output point cloud CSV")->required();
    app.add_option("--world", world_path, "Output world file")->required();
    app.add_option("--records", opts.records, "Number of records");
    app.add_option("--seed", opts.seed, "Random seed");
    app.add_option("--accuracy", opts.accuracy, "Classifier accuracy")->check(CLI::Range(0.0, 1.0));
    CLI11_PARSE(app, argc, argv);

    std::ofstream world(world_path);
    std::ofstream cloud(cloud_path);
    if (!world || !cloud) {
        std::cerr << "error[io]: cannot open outputs\n";
        return 10 + static_cast<int>(semoctree::ErrorCategory::io);
    }
    world << semoctree::emit_world(semoctree::synthetic::world_file());
    semoctree::synthetic::write_cloud_csv(cloud, semoctree::synthetic::generate_cloud(opts));
    return 0;
}
