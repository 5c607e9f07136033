# -*- coding: utf-8 -*-
CHECKPOINT_MAGIC = b'VAEC'
DESCRIPTOR_MAGIC = b'DSC1'

CHECKPOINT_KIND_VAE = 'vae'
CHECKPOINT_KIND_PROBE = 'probe'

RURAL = 0
SUBURBAN = 1
URBAN = 2

LABEL_NAMES = ('rural', 'suburban', 'urban')
LABELS = {name: index for index, name in enumerate(LABEL_NAMES)}

SOURCE_VAE = 'vae'
SOURCE_PHOG = 'phog'
SOURCE_RANDOM = 'random'
SOURCE_EXTERNAL = 'external'

# Single byte tag stored in descriptor files
SOURCE_TAGS = {
    SOURCE_VAE: 0,
    SOURCE_PHOG: 1,
    SOURCE_RANDOM: 2,
    SOURCE_EXTERNAL: 3,
}

# Column "Type" of the results table
SOURCE_TYPES = {
    SOURCE_VAE: 'Unsupervised',
    SOURCE_PHOG: 'Hand-crafted',
    SOURCE_RANDOM: 'Trivial',
    SOURCE_EXTERNAL: 'External',
}

VARIANT_VANILLA = 'vanilla'
VARIANT_DIP = 'dip'
VARIANT_DIP_II = 'dip-ii'
VARIANTS = (VARIANT_VANILLA, VARIANT_DIP, VARIANT_DIP_II)

RUN_KIND_VAE = 'vae'
RUN_KIND_PROBE = 'probe'

# Frames kept by the pose sampler on the three reference traversals
# (winter day, winter night, summer day). Reference only.
REFERENCE_TRAVERSAL_FRAME_COUNTS = (1787, 1879, 1825)

POSE_CSV_HEADER = ('frame', 'timestamp', 'x', 'y', 'yaw')
MANIFEST_CSV_HEADER = ('path', 'label', 'route')
