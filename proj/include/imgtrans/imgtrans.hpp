// Copyright 2026 The imgtrans Authors.
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

#pragma once

#include "imgtrans/base64.hpp"
#include "imgtrans/config.hpp"
#include "imgtrans/deck.hpp"
#include "imgtrans/error.hpp"
#include "imgtrans/evaluation.hpp"
#include "imgtrans/font.hpp"
#include "imgtrans/geometry.hpp"
#include "imgtrans/image.hpp"
#include "imgtrans/image_io.hpp"
#include "imgtrans/inpaint.hpp"
#include "imgtrans/layout.hpp"
#include "imgtrans/metrics.hpp"
#include "imgtrans/ocr.hpp"
#include "imgtrans/pipeline.hpp"
#include "imgtrans/remote.hpp"
#include "imgtrans/render.hpp"
#include "imgtrans/sidecar.hpp"
#include "imgtrans/text.hpp"
#include "imgtrans/timing.hpp"
#include "imgtrans/translation.hpp"
#include "imgtrans/units.hpp"
#include "imgtrans/zip.hpp"
