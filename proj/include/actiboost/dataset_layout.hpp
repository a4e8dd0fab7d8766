#pragma once

#include <string>

// Column layouts of the two public dataset formats, pinned in one place so
// off-by-one errors have a single audit point. Facts below restate the
// official dataset READMEs.

namespace actiboost::layout {

// Daily and Sports Activities: directories a01..a19 (activity), p1..p8
// (subject), files s01.txt..s60.txt. Each file is one 5-second segment
// recorded at 25 Hz: 125 rows x 45 comma-separated columns. The 45 columns
// are 5 sensor units x 9 channels. Unit order: torso, right arm, left arm,
// right leg, left leg. Channel order within a unit: x,y,z acceleration;
// x,y,z rate of turn; x,y,z magnetic field.
inline constexpr int kDsadsColumns = 45;
inline constexpr int kDsadsRowsPerFile = 125;
inline constexpr double kDsadsSampleRateHz = 25.0;
inline constexpr int kDsadsChannelsPerUnit = 9;

// Returns the column index of the unit's x-acceleration channel; y and z
// follow. Accepted names: torso, right_arm, left_arm, right_leg, left_leg.
int dsads_unit_acc_column(const std::string& unit);

// PAMAP2 Protocol files: subjectNNN.dat, space-separated, 54 columns per row,
// recorded at 100 Hz, literal "NaN" for missing values. Column 1 is the
// timestamp in seconds, column 2 the activity id, column 3 the heart rate.
// Columns 4-20 are the hand (wrist) IMU: temperature, then x,y,z acceleration
// at the +-16g scale, x,y,z acceleration at the +-6g scale, gyroscope,
// magnetometer, orientation. The +-16g channel is the one recommended by the
// dataset authors and the one read here (1-based columns 5..7).
inline constexpr int kPamapColumns = 54;
inline constexpr int kPamapActivityColumn = 1;   // 0-based
inline constexpr int kPamapHandAcc16Column = 4;  // 0-based x; y, z follow
inline constexpr double kPamapSampleRateHz = 100.0;

}  // namespace actiboost::layout
