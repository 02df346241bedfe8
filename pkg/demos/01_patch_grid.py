"""How an annotated image becomes labeled patches.

The image is cut into a grid of 20x20 patches (partial edge strips are
discarded), each patch takes the majority class of its mask block, and
patches whose block is entirely unlabeled are dropped.
"""

from _common import demo_dataset

from woundtissue.core import TissueClass, load_labeled_image
from woundtissue.patches import labeled_patches


def main() -> None:
    manifest = demo_dataset()
    entry = manifest.entries[0]
    image = load_labeled_image(entry)
    print(f"image {image.id}: {image.height}x{image.width} pixels")

    pset = labeled_patches(image, manifest.patch_side)
    grid = pset.grid
    print(f"grid: {grid.rows} x {grid.cols} patches of side {manifest.patch_side}")
    print(f"kept {len(pset.patches)} labeled patches, dropped {pset.dropped} unlabeled")

    chart = [["." for _ in range(grid.cols)] for _ in range(grid.rows)]
    for lp in pset.patches:
        chart[lp.patch.grid_row][lp.patch.grid_col] = str(int(lp.label))
    print("\npatch labels by grid cell ('.' = dropped):")
    for row in chart:
        print("  " + " ".join(row))

    print("\nper-class patch counts:")
    for cls in TissueClass:
        count = int(pset.class_counts[cls - 1])
        if count:
            print(f"  {cls.name.lower():22s} {count}")


if __name__ == "__main__":
    main()
