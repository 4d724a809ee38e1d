"""Observation strings returned to the agent.

The failure wording is kept exactly as the agent sees it in the recorded case
studies, including its grammatical slips; ``CORRECTED`` holds a cleaned-up
variant selectable through the registry's ``wording`` option.
"""

GENERIC_FAILURE = "T1"
MAPPING_FAILURE = "T2"
INVALID_TOOL = "T3"
SUCCESS = "ok"

VERBATIM = {
    GENERIC_FAILURE: (
        "An exception occurred using this tool, I need to check whether the input file exists, "
        "or whether the input contains excessive content, or whether the input format is correct, "
        "or whether the input file order is correct, or and whether I have selected the wrong tool"
    ),
    MAPPING_FAILURE: (
        "An exception occurred using this tool, I need to check whether the input file is a vector file, "
        "whether the input file is exists, and whether I have selected the wrong tool"
    ),
    INVALID_TOOL: "{name} is not a valid tool, try another one.",
}

CORRECTED = {
    GENERIC_FAILURE: (
        "An exception occurred using this tool. I need to check whether the input file exists, "
        "whether the input contains excessive content, whether the input format is correct, "
        "whether the input file order is correct, and whether I have selected the wrong tool."
    ),
    MAPPING_FAILURE: (
        "An exception occurred using this tool. I need to check whether the input file is a vector file, "
        "whether the input file exists, and whether I have selected the wrong tool."
    ),
    INVALID_TOOL: "{name} is not a valid tool, try another one.",
}

WORDINGS = {"verbatim": VERBATIM, "corrected": CORRECTED}

# success observations; placeholders are filled with display paths
POI_OK = "In this step I obtain POIs that meet the requirements, it is stored at {path}"
ROAD_OK = "Spend time: {seconds} seconds. In this step I obtain Road Networks that meet the requirements, it is stored at {path}"
RS_DOWNLOAD_OK = "Remote sensing data has been downloaded and saved in {path}. My work is done!"
LOAD_OK = "I obtain the dataset of {label}, it is stored in {path}"
LOCATION_OK = "I obtain the location of {name}, it is stored in {path}"
BUFFER_OK = "I obtain the neighboring area with a distance of {distance} for {source}, it is stored in {path}"
INTERSECT_OK = "In this step I obtain objects that meanwhile locate within {second},{first}, it is stored in {path}"
CLIP_OK = "In this step I obtain objects of {first} within {second}, it is stored in {path}"
ERASE_OK = "In this step I obtain objects that locate within {first} but not in {second}, it is stored in {path}"
UNION_OK = "In this step I obtain objects that locate within {first} or {second}, it is stored in {path}"
CROP_OK = "In this step I obtain cropped RS image that meet the requirements, it is stored at {path}"
LANDUSE_OK = "In this step I obtain RS image after land use classification, it is stored in a raster file at {path}"
R2V_OK = "In this step I obtain the converted vector file (shapefile format) based on the raster file, it is stored at {path}"
MAPPING_OK = "In this step I obtain the visual map that meet the requirements, it is stored at {path}"
COMPOSITE_OK = "In this step I obtain the composite image of {count} bands, it is stored at {path}"
