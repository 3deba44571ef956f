"""Style configuration for rendered frames and training charts."""

COLORS = {
    'text': {
        'primary': 'rgb(49, 51, 63)',
    },
    'background': '#FFFFFF',
    # One fixed color per BODY_25 limb group
    'limbs': {
        'torso': '#37536D',
        'right_arm': '#D62728',
        'left_arm': '#1F77B4',
        'right_leg': '#FF7F0E',
        'left_leg': '#2CA02C',
        'face': '#9467BD',
        'right_foot': '#8C564B',
        'left_foot': '#17BECF',
    },
    'joint': '#31333F',
    # Loss curves, in plotting order
    'losses': {
        'total': 'rgb(55, 83, 109)',
        'rec': 'rgb(72, 17, 121)',
        'adv': 'rgb(214, 39, 40)',
        'd_loss': 'rgb(255, 127, 14)',
        'mc_rec': 'rgb(26, 152, 80)',
        'mc_tri': 'rgb(44, 160, 44)',
        'id_rec': 'rgb(31, 119, 180)',
        'id_tri': 'rgb(23, 190, 207)',
    }
}

FONTS = {
    'primary': {
        'family': 'Source Sans Pro',
        'sizes': {
            'title': 20,
            'body': 14,
        }
    }
}

DIMENSIONS = {
    # Rendered frames are square
    'frame': {
        'width': 512,
        'height': 512,
        'dpi': 100,
        'line_width': 3.0,
        'joint_size': 12,
        # Fraction of the frame left empty around the skeleton
        'padding': 0.15,
    },
    'standalone': {
        'width': 800,
        'height': 500,
        'margin': dict(t=30, b=20)
    }
}
