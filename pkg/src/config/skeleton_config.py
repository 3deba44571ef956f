"""Skeleton Configuration.

This module contains the keypoint layouts shared across the pipeline: the
OpenPose BODY_25 layout the model works in, the 15-joint subset used for
comparison, and the COCO-17 layout expected by gait embedders.

Clip arrays are laid out as rows [x_0..x_{J-1}, y_0..y_{J-1}], one column per frame.
"""

# BODY_25 joints in OpenPose order
BODY_25_JOINTS = [
    'Nose', 'Neck', 'RShoulder', 'RElbow', 'RWrist',
    'LShoulder', 'LElbow', 'LWrist', 'MidHip', 'RHip',
    'RKnee', 'RAnkle', 'LHip', 'LKnee', 'LAnkle',
    'REye', 'LEye', 'REar', 'LEar', 'LBigToe',
    'LSmallToe', 'LHeel', 'RBigToe', 'RSmallToe', 'RHeel'
]

NUM_JOINTS = len(BODY_25_JOINTS)

# Joints used by normalization
MID_HIP = 8
NECK = 1

# Kinematic tree rooted at MidHip (-1 = root)
BODY_25_PARENTS = {
    8: -1,
    1: 8, 0: 1,
    2: 1, 3: 2, 4: 3,
    5: 1, 6: 5, 7: 6,
    9: 8, 10: 9, 11: 10,
    12: 8, 13: 12, 14: 13,
    15: 0, 16: 0, 17: 15, 18: 16,
    19: 14, 20: 19, 21: 14,
    22: 11, 23: 22, 24: 11,
}

# Limb graph drawn by the renderer, grouped by body part
BODY_25_LIMBS = {
    'torso': [(1, 8), (1, 0)],
    'right_arm': [(1, 2), (2, 3), (3, 4)],
    'left_arm': [(1, 5), (5, 6), (6, 7)],
    'right_leg': [(8, 9), (9, 10), (10, 11)],
    'left_leg': [(8, 12), (12, 13), (13, 14)],
    'face': [(0, 15), (15, 17), (0, 16), (16, 18)],
    'right_foot': [(11, 22), (22, 23), (11, 24)],
    'left_foot': [(14, 19), (19, 20), (14, 21)],
}

# Nose through ankles; drops the eye, ear and foot detail joints
SUBSET_15 = list(range(15))

COCO_17_JOINTS = [
    'nose', 'left_eye', 'right_eye', 'left_ear', 'right_ear',
    'left_shoulder', 'right_shoulder', 'left_elbow', 'right_elbow',
    'left_wrist', 'right_wrist', 'left_hip', 'right_hip',
    'left_knee', 'right_knee', 'left_ankle', 'right_ankle'
]

# COCO-17 joint -> BODY_25 joint, for joints both layouts share
COCO_FROM_BODY_25 = {
    'nose': 0,
    'left_shoulder': 5, 'right_shoulder': 2,
    'left_elbow': 6, 'right_elbow': 3,
    'left_wrist': 7, 'right_wrist': 4,
    'left_hip': 12, 'right_hip': 9,
    'left_knee': 13, 'right_knee': 10,
    'left_ankle': 14, 'right_ankle': 11,
}

# COCO-17 face joints the 15-joint subset lacks -> BODY_25 joint in full clips
COCO_FACE_FROM_BODY_25 = {
    'left_eye': 16, 'right_eye': 15,
    'left_ear': 18, 'right_ear': 17,
}

# Linear head model for the baseline mapper:
# joint = nose + up * (nose - neck) + side * (LShoulder - RShoulder)
COCO_FACE_OFFSETS = {
    'left_eye': {'up': 0.15, 'side': 0.10},
    'right_eye': {'up': 0.15, 'side': -0.10},
    'left_ear': {'up': 0.05, 'side': 0.20},
    'right_ear': {'up': 0.05, 'side': -0.20},
}
