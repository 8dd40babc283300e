#pragma once

#include <array>
#include <cstdint>

// Icosahedron geometry and base-cell lookup tables for the H3 cell index
// system (https://h3geo.org). Values conform to the published H3 spec.

namespace svipipe::h3detail {

struct GeoRad { double lat; double lng; };

inline constexpr std::array<GeoRad, 20> kFaceCenterGeo = {{
    {0.80358264971899, 1.2483974196173961},
    {1.3077478834556382, 2.5369450098779214},
    {1.054751253523952, -1.3475173589003966},
    {0.6001915955381868, -0.45060390946975576},
    {0.49171542819877384, 0.40198820291130694},
    {0.1727453274156187, 1.6781468852804338},
    {0.6059293215713507, 2.9539233298124117},
    {0.42737051832897965, -1.8888762003362853},
    {-0.07906611854921283, -0.7334295133808677},
    {-0.23096164445538364, 0.506495587332349},
    {0.07906611854921283, 2.4081631402089254},
    {0.23096164445538364, -2.635097066257444},
    {-0.1727453274156187, -1.4634457683093596},
    {-0.6059293215713507, -0.18766932377738163},
    {-0.42737051832897965, 1.2527164532535078},
    {-0.6001915955381868, 2.6909887441200375},
    {-0.49171542819877384, -2.7396044506784865},
    {-0.80358264971899, -1.8931952339723972},
    {-1.3077478834556382, -0.6046476437118721},
    {-1.054751253523952, 1.7940752946893965},
}};

struct XYZ { double x; double y; double z; };

inline constexpr std::array<XYZ, 20> kFaceCenterPoint = {{
    {0.2199307791404606, 0.6583691780274996, 0.7198475378926182},
    {-0.2139234834501421, 0.1478171829550703, 0.9656017935214205},
    {0.1092625278784797, -0.481195157287321, 0.8697775121287253},
    {0.7428567301586791, -0.3593941678278028, 0.5648005936517033},
    {0.8112534709140969, 0.3448953237639384, 0.472138773641393},
    {-0.1055498149613921, 0.9794457296411413, 0.1718874610009365},
    {-0.8075407579970092, 0.1533552485898818, 0.5695261994882688},
    {-0.2846148069787907, -0.8644080972654206, 0.4144792552473539},
    {0.7405621473854482, -0.6673299564565524, -0.0789837646326737},
    {0.8512303986474293, 0.4722343788582681, -0.2289137388687808},
    {-0.7405621473854481, 0.6673299564565524, 0.0789837646326737},
    {-0.8512303986474292, -0.4722343788582682, 0.2289137388687808},
    {0.1055498149613919, -0.9794457296411413, -0.1718874610009365},
    {0.8075407579970092, -0.1533552485898819, -0.5695261994882688},
    {0.2846148069787908, 0.8644080972654204, -0.4144792552473539},
    {-0.7428567301586791, 0.3593941678278027, -0.5648005936517033},
    {-0.811253470914097, -0.3448953237639382, -0.472138773641393},
    {-0.2199307791404607, -0.6583691780274996, -0.7198475378926182},
    {0.213923483450142, -0.1478171829550704, -0.9656017935214205},
    {-0.1092625278784796, 0.481195157287321, -0.8697775121287253},
}};

// Azimuth (radians) from each face center to its i/j/k axes (class II).
inline constexpr std::array<std::array<double, 3>, 20> kFaceAxesAzRadsCII = {{
    {{5.6199582685239395, 3.5255631661307447, 1.4311680637375488}},
    {{5.7603390817141875, 3.665943979320992, 1.571548876927796}},
    {{0.78021365439343, 4.969003859179821, 2.8746087567866256}},
    {{0.4304693639799999, 4.619259568766391, 2.5248644663731956}},
    {{6.130269123335111, 4.0358740209419155, 1.9414789185487202}},
    {{2.692877706530643, 0.5984826041374471, 4.787272808923838}},
    {{2.982963003477244, 0.8885679010840484, 5.07735810587044}},
    {{3.532912002790141, 1.4385169003969456, 5.627307105183337}},
    {{3.494305004259568, 1.3999099018663728, 5.588700106652764}},
    {{3.0032141694995382, 0.908819067106343, 5.0976092718927335}},
    {{5.930472956509812, 3.836077854116616, 1.7416827517234204}},
    {{0.13837848409025486, 4.327168688876646, 2.23277358648345}},
    {{0.4487149470591504, 4.6375051518455415, 2.543110049452346}},
    {{0.15862965011254937, 4.3474198548989405, 2.2530247525057447}},
    {{5.891865957979238, 3.797470855586043, 1.7030757531928475}},
    {{2.711123289609793, 0.6167281872165977, 4.8055183920029885}},
    {{3.294508837434268, 1.2001137350410729, 5.388903939827464}},
    {{3.80481969224544, 1.7104245898522445, 5.8992147946386355}},
    {{3.6644388790551923, 1.570043776661997, 5.758833981448388}},
    {{2.361378999196363, 0.2669838968031676, 4.455774101589559}},
}};

struct FaceOrientIJK {
    int face;
    int translate_i;
    int translate_j;
    int translate_k;
    int ccw_rot60;
};

// Neighboring face transforms: [face][0=central, 1=IJ, 2=KI, 3=JK].
inline constexpr std::array<std::array<FaceOrientIJK, 4>, 20> kFaceNeighbors = {{
    {{{0, 0, 0, 0, 0}, {4, 2, 0, 2, 1}, {1, 2, 2, 0, 5}, {5, 0, 2, 2, 3}}},
    {{{1, 0, 0, 0, 0}, {0, 2, 0, 2, 1}, {2, 2, 2, 0, 5}, {6, 0, 2, 2, 3}}},
    {{{2, 0, 0, 0, 0}, {1, 2, 0, 2, 1}, {3, 2, 2, 0, 5}, {7, 0, 2, 2, 3}}},
    {{{3, 0, 0, 0, 0}, {2, 2, 0, 2, 1}, {4, 2, 2, 0, 5}, {8, 0, 2, 2, 3}}},
    {{{4, 0, 0, 0, 0}, {3, 2, 0, 2, 1}, {0, 2, 2, 0, 5}, {9, 0, 2, 2, 3}}},
    {{{5, 0, 0, 0, 0}, {10, 2, 2, 0, 3}, {14, 2, 0, 2, 3}, {0, 0, 2, 2, 3}}},
    {{{6, 0, 0, 0, 0}, {11, 2, 2, 0, 3}, {10, 2, 0, 2, 3}, {1, 0, 2, 2, 3}}},
    {{{7, 0, 0, 0, 0}, {12, 2, 2, 0, 3}, {11, 2, 0, 2, 3}, {2, 0, 2, 2, 3}}},
    {{{8, 0, 0, 0, 0}, {13, 2, 2, 0, 3}, {12, 2, 0, 2, 3}, {3, 0, 2, 2, 3}}},
    {{{9, 0, 0, 0, 0}, {14, 2, 2, 0, 3}, {13, 2, 0, 2, 3}, {4, 0, 2, 2, 3}}},
    {{{10, 0, 0, 0, 0}, {5, 2, 2, 0, 3}, {6, 2, 0, 2, 3}, {15, 0, 2, 2, 3}}},
    {{{11, 0, 0, 0, 0}, {6, 2, 2, 0, 3}, {7, 2, 0, 2, 3}, {16, 0, 2, 2, 3}}},
    {{{12, 0, 0, 0, 0}, {7, 2, 2, 0, 3}, {8, 2, 0, 2, 3}, {17, 0, 2, 2, 3}}},
    {{{13, 0, 0, 0, 0}, {8, 2, 2, 0, 3}, {9, 2, 0, 2, 3}, {18, 0, 2, 2, 3}}},
    {{{14, 0, 0, 0, 0}, {9, 2, 2, 0, 3}, {5, 2, 0, 2, 3}, {19, 0, 2, 2, 3}}},
    {{{15, 0, 0, 0, 0}, {16, 2, 0, 2, 1}, {19, 2, 2, 0, 5}, {10, 0, 2, 2, 3}}},
    {{{16, 0, 0, 0, 0}, {17, 2, 0, 2, 1}, {15, 2, 2, 0, 5}, {11, 0, 2, 2, 3}}},
    {{{17, 0, 0, 0, 0}, {18, 2, 0, 2, 1}, {16, 2, 2, 0, 5}, {12, 0, 2, 2, 3}}},
    {{{18, 0, 0, 0, 0}, {19, 2, 0, 2, 1}, {17, 2, 2, 0, 5}, {13, 0, 2, 2, 3}}},
    {{{19, 0, 0, 0, 0}, {15, 2, 0, 2, 1}, {18, 2, 2, 0, 5}, {14, 0, 2, 2, 3}}},
}};

// Direction from an origin face to a destination face (-1 when not adjacent):
// 0 = central, 1 = IJ quadrant, 2 = KI quadrant, 3 = JK quadrant.
inline constexpr std::array<std::array<int8_t, 20>, 20> kAdjacentFaceDir = {{
    {{0, 2, -1, -1, 1, 3, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1}},
    {{1, 0, 2, -1, -1, -1, 3, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1}},
    {{-1, 1, 0, 2, -1, -1, -1, 3, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1}},
    {{-1, -1, 1, 0, 2, -1, -1, -1, 3, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1}},
    {{2, -1, -1, 1, 0, -1, -1, -1, -1, 3, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1}},
    {{3, -1, -1, -1, -1, 0, -1, -1, -1, -1, 1, -1, -1, -1, 2, -1, -1, -1, -1, -1}},
    {{-1, 3, -1, -1, -1, -1, 0, -1, -1, -1, 2, 1, -1, -1, -1, -1, -1, -1, -1, -1}},
    {{-1, -1, 3, -1, -1, -1, -1, 0, -1, -1, -1, 2, 1, -1, -1, -1, -1, -1, -1, -1}},
    {{-1, -1, -1, 3, -1, -1, -1, -1, 0, -1, -1, -1, 2, 1, -1, -1, -1, -1, -1, -1}},
    {{-1, -1, -1, -1, 3, -1, -1, -1, -1, 0, -1, -1, -1, 2, 1, -1, -1, -1, -1, -1}},
    {{-1, -1, -1, -1, -1, 1, 2, -1, -1, -1, 0, -1, -1, -1, -1, 3, -1, -1, -1, -1}},
    {{-1, -1, -1, -1, -1, -1, 1, 2, -1, -1, -1, 0, -1, -1, -1, -1, 3, -1, -1, -1}},
    {{-1, -1, -1, -1, -1, -1, -1, 1, 2, -1, -1, -1, 0, -1, -1, -1, -1, 3, -1, -1}},
    {{-1, -1, -1, -1, -1, -1, -1, -1, 1, 2, -1, -1, -1, 0, -1, -1, -1, -1, 3, -1}},
    {{-1, -1, -1, -1, -1, 2, -1, -1, -1, 1, -1, -1, -1, -1, 0, -1, -1, -1, -1, 3}},
    {{-1, -1, -1, -1, -1, -1, -1, -1, -1, -1, 3, -1, -1, -1, -1, 0, 1, -1, -1, 2}},
    {{-1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, 3, -1, -1, -1, 2, 0, 1, -1, -1}},
    {{-1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, 3, -1, -1, -1, 2, 0, 1, -1}},
    {{-1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, 3, -1, -1, -1, 2, 0, 1}},
    {{-1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, 3, 1, -1, -1, 2, 0}},
}};

struct BaseCellRotation {
    uint8_t base_cell;
    uint8_t ccw_rot60;
};

// Resolution-0 base cell lookup: [face][i][j][k] with i,j,k in [0,2].
inline constexpr std::array<std::array<std::array<std::array<BaseCellRotation, 3>, 3>, 3>, 20>
    kFaceIjkBaseCells = {{
    {{
        {{{{{16, 0}, {18, 0}, {24, 0}}}, {{{33, 0}, {30, 0}, {32, 3}}}, {{{49, 1}, {48, 3}, {50, 3}}}}},
        {{{{{8, 0}, {5, 5}, {10, 5}}}, {{{22, 0}, {16, 0}, {18, 0}}}, {{{41, 1}, {33, 0}, {30, 0}}}}},
        {{{{{4, 0}, {0, 5}, {2, 5}}}, {{{15, 1}, {8, 0}, {5, 5}}}, {{{31, 1}, {22, 0}, {16, 0}}}}},
    }},
    {{
        {{{{{2, 0}, {6, 0}, {14, 0}}}, {{{10, 0}, {11, 0}, {17, 3}}}, {{{24, 1}, {23, 3}, {25, 3}}}}},
        {{{{{0, 0}, {1, 5}, {9, 5}}}, {{{5, 0}, {2, 0}, {6, 0}}}, {{{18, 1}, {10, 0}, {11, 0}}}}},
        {{{{{4, 1}, {3, 5}, {7, 5}}}, {{{8, 1}, {0, 0}, {1, 5}}}, {{{16, 1}, {5, 0}, {2, 0}}}}},
    }},
    {{
        {{{{{7, 0}, {21, 0}, {38, 0}}}, {{{9, 0}, {19, 0}, {34, 3}}}, {{{14, 1}, {20, 3}, {36, 3}}}}},
        {{{{{3, 0}, {13, 5}, {29, 5}}}, {{{1, 0}, {7, 0}, {21, 0}}}, {{{6, 1}, {9, 0}, {19, 0}}}}},
        {{{{{4, 2}, {12, 5}, {26, 5}}}, {{{0, 1}, {3, 0}, {13, 5}}}, {{{2, 1}, {1, 0}, {7, 0}}}}},
    }},
    {{
        {{{{{26, 0}, {42, 0}, {58, 0}}}, {{{29, 0}, {43, 0}, {62, 3}}}, {{{38, 1}, {47, 3}, {64, 3}}}}},
        {{{{{12, 0}, {28, 5}, {44, 5}}}, {{{13, 0}, {26, 0}, {42, 0}}}, {{{21, 1}, {29, 0}, {43, 0}}}}},
        {{{{{4, 3}, {15, 5}, {31, 5}}}, {{{3, 1}, {12, 0}, {28, 5}}}, {{{7, 1}, {13, 0}, {26, 0}}}}},
    }},
    {{
        {{{{{31, 0}, {41, 0}, {49, 0}}}, {{{44, 0}, {53, 0}, {61, 3}}}, {{{58, 1}, {65, 3}, {75, 3}}}}},
        {{{{{15, 0}, {22, 5}, {33, 5}}}, {{{28, 0}, {31, 0}, {41, 0}}}, {{{42, 1}, {44, 0}, {53, 0}}}}},
        {{{{{4, 4}, {8, 5}, {16, 5}}}, {{{12, 1}, {15, 0}, {22, 5}}}, {{{26, 1}, {28, 0}, {31, 0}}}}},
    }},
    {{
        {{{{{50, 0}, {48, 0}, {49, 3}}}, {{{32, 0}, {30, 3}, {33, 3}}}, {{{24, 3}, {18, 3}, {16, 3}}}}},
        {{{{{70, 0}, {67, 0}, {66, 3}}}, {{{52, 3}, {50, 0}, {48, 0}}}, {{{37, 3}, {32, 0}, {30, 3}}}}},
        {{{{{83, 0}, {87, 3}, {85, 3}}}, {{{74, 3}, {70, 0}, {67, 0}}}, {{{57, 1}, {52, 3}, {50, 0}}}}},
    }},
    {{
        {{{{{25, 0}, {23, 0}, {24, 3}}}, {{{17, 0}, {11, 3}, {10, 3}}}, {{{14, 3}, {6, 3}, {2, 3}}}}},
        {{{{{45, 0}, {39, 0}, {37, 3}}}, {{{35, 3}, {25, 0}, {23, 0}}}, {{{27, 3}, {17, 0}, {11, 3}}}}},
        {{{{{63, 0}, {59, 3}, {57, 3}}}, {{{56, 3}, {45, 0}, {39, 0}}}, {{{46, 3}, {35, 3}, {25, 0}}}}},
    }},
    {{
        {{{{{36, 0}, {20, 0}, {14, 3}}}, {{{34, 0}, {19, 3}, {9, 3}}}, {{{38, 3}, {21, 3}, {7, 3}}}}},
        {{{{{55, 0}, {40, 0}, {27, 3}}}, {{{54, 3}, {36, 0}, {20, 0}}}, {{{51, 3}, {34, 0}, {19, 3}}}}},
        {{{{{72, 0}, {60, 3}, {46, 3}}}, {{{73, 3}, {55, 0}, {40, 0}}}, {{{71, 3}, {54, 3}, {36, 0}}}}},
    }},
    {{
        {{{{{64, 0}, {47, 0}, {38, 3}}}, {{{62, 0}, {43, 3}, {29, 3}}}, {{{58, 3}, {42, 3}, {26, 3}}}}},
        {{{{{84, 0}, {69, 0}, {51, 3}}}, {{{82, 3}, {64, 0}, {47, 0}}}, {{{76, 3}, {62, 0}, {43, 3}}}}},
        {{{{{97, 0}, {89, 3}, {71, 3}}}, {{{98, 3}, {84, 0}, {69, 0}}}, {{{96, 3}, {82, 3}, {64, 0}}}}},
    }},
    {{
        {{{{{75, 0}, {65, 0}, {58, 3}}}, {{{61, 0}, {53, 3}, {44, 3}}}, {{{49, 3}, {41, 3}, {31, 3}}}}},
        {{{{{94, 0}, {86, 0}, {76, 3}}}, {{{81, 3}, {75, 0}, {65, 0}}}, {{{66, 3}, {61, 0}, {53, 3}}}}},
        {{{{{107, 0}, {104, 3}, {96, 3}}}, {{{101, 3}, {94, 0}, {86, 0}}}, {{{85, 3}, {81, 3}, {75, 0}}}}},
    }},
    {{
        {{{{{57, 0}, {59, 0}, {63, 3}}}, {{{74, 0}, {78, 3}, {79, 3}}}, {{{83, 3}, {92, 3}, {95, 3}}}}},
        {{{{{37, 0}, {39, 3}, {45, 3}}}, {{{52, 0}, {57, 0}, {59, 0}}}, {{{70, 3}, {74, 0}, {78, 3}}}}},
        {{{{{24, 0}, {23, 3}, {25, 3}}}, {{{32, 3}, {37, 0}, {39, 3}}}, {{{50, 3}, {52, 0}, {57, 0}}}}},
    }},
    {{
        {{{{{46, 0}, {60, 0}, {72, 3}}}, {{{56, 0}, {68, 3}, {80, 3}}}, {{{63, 3}, {77, 3}, {90, 3}}}}},
        {{{{{27, 0}, {40, 3}, {55, 3}}}, {{{35, 0}, {46, 0}, {60, 0}}}, {{{45, 3}, {56, 0}, {68, 3}}}}},
        {{{{{14, 0}, {20, 3}, {36, 3}}}, {{{17, 3}, {27, 0}, {40, 3}}}, {{{25, 3}, {35, 0}, {46, 0}}}}},
    }},
    {{
        {{{{{71, 0}, {89, 0}, {97, 3}}}, {{{73, 0}, {91, 3}, {103, 3}}}, {{{72, 3}, {88, 3}, {105, 3}}}}},
        {{{{{51, 0}, {69, 3}, {84, 3}}}, {{{54, 0}, {71, 0}, {89, 0}}}, {{{55, 3}, {73, 0}, {91, 3}}}}},
        {{{{{38, 0}, {47, 3}, {64, 3}}}, {{{34, 3}, {51, 0}, {69, 3}}}, {{{36, 3}, {54, 0}, {71, 0}}}}},
    }},
    {{
        {{{{{96, 0}, {104, 0}, {107, 3}}}, {{{98, 0}, {110, 3}, {115, 3}}}, {{{97, 3}, {111, 3}, {119, 3}}}}},
        {{{{{76, 0}, {86, 3}, {94, 3}}}, {{{82, 0}, {96, 0}, {104, 0}}}, {{{84, 3}, {98, 0}, {110, 3}}}}},
        {{{{{58, 0}, {65, 3}, {75, 3}}}, {{{62, 3}, {76, 0}, {86, 3}}}, {{{64, 3}, {82, 0}, {96, 0}}}}},
    }},
    {{
        {{{{{85, 0}, {87, 0}, {83, 3}}}, {{{101, 0}, {102, 3}, {100, 3}}}, {{{107, 3}, {112, 3}, {114, 3}}}}},
        {{{{{66, 0}, {67, 3}, {70, 3}}}, {{{81, 0}, {85, 0}, {87, 0}}}, {{{94, 3}, {101, 0}, {102, 3}}}}},
        {{{{{49, 0}, {48, 3}, {50, 3}}}, {{{61, 3}, {66, 0}, {67, 3}}}, {{{75, 3}, {81, 0}, {85, 0}}}}},
    }},
    {{
        {{{{{95, 0}, {92, 0}, {83, 0}}}, {{{79, 0}, {78, 0}, {74, 3}}}, {{{63, 1}, {59, 3}, {57, 3}}}}},
        {{{{{109, 0}, {108, 0}, {100, 5}}}, {{{93, 1}, {95, 0}, {92, 0}}}, {{{77, 1}, {79, 0}, {78, 0}}}}},
        {{{{{117, 4}, {118, 5}, {114, 5}}}, {{{106, 1}, {109, 0}, {108, 0}}}, {{{90, 1}, {93, 1}, {95, 0}}}}},
    }},
    {{
        {{{{{90, 0}, {77, 0}, {63, 0}}}, {{{80, 0}, {68, 0}, {56, 3}}}, {{{72, 1}, {60, 3}, {46, 3}}}}},
        {{{{{106, 0}, {93, 0}, {79, 5}}}, {{{99, 1}, {90, 0}, {77, 0}}}, {{{88, 1}, {80, 0}, {68, 0}}}}},
        {{{{{117, 3}, {109, 5}, {95, 5}}}, {{{113, 1}, {106, 0}, {93, 0}}}, {{{105, 1}, {99, 1}, {90, 0}}}}},
    }},
    {{
        {{{{{105, 0}, {88, 0}, {72, 0}}}, {{{103, 0}, {91, 0}, {73, 3}}}, {{{97, 1}, {89, 3}, {71, 3}}}}},
        {{{{{113, 0}, {99, 0}, {80, 5}}}, {{{116, 1}, {105, 0}, {88, 0}}}, {{{111, 1}, {103, 0}, {91, 0}}}}},
        {{{{{117, 2}, {106, 5}, {90, 5}}}, {{{121, 1}, {113, 0}, {99, 0}}}, {{{119, 1}, {116, 1}, {105, 0}}}}},
    }},
    {{
        {{{{{119, 0}, {111, 0}, {97, 0}}}, {{{115, 0}, {110, 0}, {98, 3}}}, {{{107, 1}, {104, 3}, {96, 3}}}}},
        {{{{{121, 0}, {116, 0}, {103, 5}}}, {{{120, 1}, {119, 0}, {111, 0}}}, {{{112, 1}, {115, 0}, {110, 0}}}}},
        {{{{{117, 1}, {113, 5}, {105, 5}}}, {{{118, 1}, {121, 0}, {116, 0}}}, {{{114, 1}, {120, 1}, {119, 0}}}}},
    }},
    {{
        {{{{{114, 0}, {112, 0}, {107, 0}}}, {{{100, 0}, {102, 0}, {101, 3}}}, {{{83, 1}, {87, 3}, {85, 3}}}}},
        {{{{{118, 0}, {120, 0}, {115, 5}}}, {{{108, 1}, {114, 0}, {112, 0}}}, {{{92, 1}, {100, 0}, {102, 0}}}}},
        {{{{{117, 0}, {121, 5}, {119, 5}}}, {{{109, 1}, {118, 0}, {120, 0}}}, {{{95, 1}, {108, 1}, {114, 0}}}}},
    }},
}};

struct BaseCellData {
    uint8_t home_face;
    uint8_t home_i;
    uint8_t home_j;
    uint8_t home_k;
    bool is_pentagon;
    // Faces with a clockwise offset for pentagonal cells (-1 = none).
    int8_t cw_offset_faces[2];
};

inline constexpr std::array<BaseCellData, 122> kBaseCellData = {{
    {1, 1, 0, 0, false, {-1, -1}},
    {2, 1, 1, 0, false, {-1, -1}},
    {1, 0, 0, 0, false, {-1, -1}},
    {2, 1, 0, 0, false, {-1, -1}},
    {0, 2, 0, 0, true, {-1, -1}},
    {1, 1, 1, 0, false, {-1, -1}},
    {1, 0, 0, 1, false, {-1, -1}},
    {2, 0, 0, 0, false, {-1, -1}},
    {0, 1, 0, 0, false, {-1, -1}},
    {2, 0, 1, 0, false, {-1, -1}},
    {1, 0, 1, 0, false, {-1, -1}},
    {1, 0, 1, 1, false, {-1, -1}},
    {3, 1, 0, 0, false, {-1, -1}},
    {3, 1, 1, 0, false, {-1, -1}},
    {11, 2, 0, 0, true, {2, 6}},
    {4, 1, 0, 0, false, {-1, -1}},
    {0, 0, 0, 0, false, {-1, -1}},
    {6, 0, 1, 0, false, {-1, -1}},
    {0, 0, 0, 1, false, {-1, -1}},
    {2, 0, 1, 1, false, {-1, -1}},
    {7, 0, 0, 1, false, {-1, -1}},
    {2, 0, 0, 1, false, {-1, -1}},
    {0, 1, 1, 0, false, {-1, -1}},
    {6, 0, 0, 1, false, {-1, -1}},
    {10, 2, 0, 0, true, {1, 5}},
    {6, 0, 0, 0, false, {-1, -1}},
    {3, 0, 0, 0, false, {-1, -1}},
    {11, 1, 0, 0, false, {-1, -1}},
    {4, 1, 1, 0, false, {-1, -1}},
    {3, 0, 1, 0, false, {-1, -1}},
    {0, 0, 1, 1, false, {-1, -1}},
    {4, 0, 0, 0, false, {-1, -1}},
    {5, 0, 1, 0, false, {-1, -1}},
    {0, 0, 1, 0, false, {-1, -1}},
    {7, 0, 1, 0, false, {-1, -1}},
    {11, 1, 1, 0, false, {-1, -1}},
    {7, 0, 0, 0, false, {-1, -1}},
    {10, 1, 0, 0, false, {-1, -1}},
    {12, 2, 0, 0, true, {3, 7}},
    {6, 1, 0, 1, false, {-1, -1}},
    {7, 1, 0, 1, false, {-1, -1}},
    {4, 0, 0, 1, false, {-1, -1}},
    {3, 0, 0, 1, false, {-1, -1}},
    {3, 0, 1, 1, false, {-1, -1}},
    {4, 0, 1, 0, false, {-1, -1}},
    {6, 1, 0, 0, false, {-1, -1}},
    {11, 0, 0, 0, false, {-1, -1}},
    {8, 0, 0, 1, false, {-1, -1}},
    {5, 0, 0, 1, false, {-1, -1}},
    {14, 2, 0, 0, true, {0, 9}},
    {5, 0, 0, 0, false, {-1, -1}},
    {12, 1, 0, 0, false, {-1, -1}},
    {10, 1, 1, 0, false, {-1, -1}},
    {4, 0, 1, 1, false, {-1, -1}},
    {12, 1, 1, 0, false, {-1, -1}},
    {7, 1, 0, 0, false, {-1, -1}},
    {11, 0, 1, 0, false, {-1, -1}},
    {10, 0, 0, 0, false, {-1, -1}},
    {13, 2, 0, 0, true, {4, 8}},
    {10, 0, 0, 1, false, {-1, -1}},
    {11, 0, 0, 1, false, {-1, -1}},
    {9, 0, 1, 0, false, {-1, -1}},
    {8, 0, 1, 0, false, {-1, -1}},
    {6, 2, 0, 0, true, {11, 15}},
    {8, 0, 0, 0, false, {-1, -1}},
    {9, 0, 0, 1, false, {-1, -1}},
    {14, 1, 0, 0, false, {-1, -1}},
    {5, 1, 0, 1, false, {-1, -1}},
    {16, 0, 1, 1, false, {-1, -1}},
    {8, 1, 0, 1, false, {-1, -1}},
    {5, 1, 0, 0, false, {-1, -1}},
    {12, 0, 0, 0, false, {-1, -1}},
    {7, 2, 0, 0, true, {12, 16}},
    {12, 0, 1, 0, false, {-1, -1}},
    {10, 0, 1, 0, false, {-1, -1}},
    {9, 0, 0, 0, false, {-1, -1}},
    {13, 1, 0, 0, false, {-1, -1}},
    {16, 0, 0, 1, false, {-1, -1}},
    {15, 0, 1, 1, false, {-1, -1}},
    {15, 0, 1, 0, false, {-1, -1}},
    {16, 0, 1, 0, false, {-1, -1}},
    {14, 1, 1, 0, false, {-1, -1}},
    {13, 1, 1, 0, false, {-1, -1}},
    {5, 2, 0, 0, true, {10, 19}},
    {8, 1, 0, 0, false, {-1, -1}},
    {14, 0, 0, 0, false, {-1, -1}},
    {9, 1, 0, 1, false, {-1, -1}},
    {14, 0, 0, 1, false, {-1, -1}},
    {17, 0, 0, 1, false, {-1, -1}},
    {12, 0, 0, 1, false, {-1, -1}},
    {16, 0, 0, 0, false, {-1, -1}},
    {17, 0, 1, 1, false, {-1, -1}},
    {15, 0, 0, 1, false, {-1, -1}},
    {16, 1, 0, 1, false, {-1, -1}},
    {9, 1, 0, 0, false, {-1, -1}},
    {15, 0, 0, 0, false, {-1, -1}},
    {13, 0, 0, 0, false, {-1, -1}},
    {8, 2, 0, 0, true, {13, 17}},
    {13, 0, 1, 0, false, {-1, -1}},
    {17, 1, 0, 1, false, {-1, -1}},
    {19, 0, 1, 0, false, {-1, -1}},
    {14, 0, 1, 0, false, {-1, -1}},
    {19, 0, 1, 1, false, {-1, -1}},
    {17, 0, 1, 0, false, {-1, -1}},
    {13, 0, 0, 1, false, {-1, -1}},
    {17, 0, 0, 0, false, {-1, -1}},
    {16, 1, 0, 0, false, {-1, -1}},
    {9, 2, 0, 0, true, {14, 18}},
    {15, 1, 0, 1, false, {-1, -1}},
    {15, 1, 0, 0, false, {-1, -1}},
    {18, 0, 1, 1, false, {-1, -1}},
    {18, 0, 0, 1, false, {-1, -1}},
    {19, 0, 0, 1, false, {-1, -1}},
    {17, 1, 0, 0, false, {-1, -1}},
    {19, 0, 0, 0, false, {-1, -1}},
    {18, 0, 1, 0, false, {-1, -1}},
    {18, 1, 0, 1, false, {-1, -1}},
    {19, 2, 0, 0, true, {-1, -1}},
    {19, 1, 0, 0, false, {-1, -1}},
    {18, 0, 0, 0, false, {-1, -1}},
    {19, 1, 0, 1, false, {-1, -1}},
    {18, 1, 0, 0, false, {-1, -1}},
}};

// Maximum IJK dimension and unit scale per class-II resolution (index = res).
inline constexpr std::array<int32_t, 17> kMaxDimByCIIres = {
    2, -1, 14, -1, 98, -1, 686, -1, 4802, -1, 33614,
    -1, 235298, -1, 1647086, -1, 11529602};

inline constexpr std::array<int32_t, 17> kUnitScaleByCIIres = {
    1, -1, 7, -1, 49, -1, 343, -1, 2401, -1, 16807,
    -1, 117649, -1, 823543, -1, 5764801};

inline constexpr std::array<double, 17> kSqrt7Powers = {
    1.0, 2.6457513110645907, 7.0, 18.520259177452136, 49.00000000000001,
    129.64181424216497, 343.0000000000001, 907.4926996951549,
    2401.000000000001, 6352.448897866085, 16807.000000000007,
    44467.1422850626, 117649.00000000007, 311269.9959954382,
    823543.0000000006, 2178889.971968068, 5764801.0};

inline constexpr std::array<double, 17> kInvSqrt7Powers = {
    1.0, 0.3779644730092272, 0.14285714285714285, 0.05399492471560388,
    0.02040816326530612, 0.007713560673657697, 0.002915451895043731,
    0.0011019372390939565, 0.0004164931278633901, 0.00015741960558485093,
    0.00005949901826619858, 0.00002248851508355013, 0.000008499859752314082,
    0.000003212645011935733, 0.0000012142656789020115,
    0.0000004589492874193903, 0.00000017346652555743034};

}  // namespace svipipe::h3detail
