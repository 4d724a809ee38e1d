"""Tool names and the descriptions the agent reasons over.

These strings are part of the agent's prompt; edits change agent behaviour and
are pinned by a golden test.
"""

DESCRIPTIONS = {
    "Get_POI_By_Keywords": (
        "Use this tool when you need to get POI data for a Chinese city by POI keywords. "
        "The input of this tool must at least provide the city name, after which the user can provide "
        "multiple POI categories or none. City names and each POI category are separated by commas."
    ),
    "Get_POI_By_Polygon": (
        "Use this tool when you need to get POI data within a polygonal area. "
        "Input a longitude-latitude coordinate pair representing the area of the polygon. "
        'Longitude and latitude are separated by ",", and the coordinate pairs are separated by "|". '
        "The first and last coordinate pairs need to be the same."
    ),
    "Get_Road_Network_By_Rectangle": (
        "Use this tool when you need to get road network data within a rectangular area. "
        "Input a comma-separated string of four-tuples, representing two longitude ranges x1, x2 enclosed "
        "in a rectangle, and two latitude ranges y1, y2 enclosed in a rectangle."
    ),
    "Get_Remote_Sensing_Image": (
        "Input parameters, in order of province, city, start time and end time, in comma-separated strings"
    ),
    "Load_Subway_Data": "Load the dataset of subway stations, return the file path of subway stations.",
    "Load_Hotel_Data": "Load the dataset of hotels, return the file path of hotels.",
    "Load_Factory_Data": "Load the dataset of factories, return the file path of factories.",
    "Load_Supermarket_Data": "Load the dataset of supermarkets, return the file path of supermarkets.",
    "Load_Remote_Sensing_Image_Data": "Load the dataset of remote sensing image, return the file path of RS image.",
    "Load_Wuhan_Main_Urban_Data": "Load the dataset of Wuhan main urban, return the file path of Wuhan main urban.",
    "Obtain location": "Input a place name, return its location. Use it when you need to find unknown locations.",
    "Buffer": 'Input "shapefile, number", return the neighboring range around this shapefile.',
    "Intersect": "Input two shapefiles, retain objects meanwhile within (inside) both shapefiles.",
    "Clip": 'Input two shapefiles "A, B", return (keep) objects of A only within (inside) the range of B.',
    "Erase": 'Input two shapefiles "A, B", remove (erase) objects of A only within (inside) the range of B.',
    "Crop_Remote_Sensing_Image": (
        "Use this tool when you need to crop an image of Remote Sensing. Input a tif file storing remote sensing "
        "and a shapefile storing the cropping area, which are separated by a comma."
    ),
    "LandUse_Classification": (
        "Use this tool when you need to perform land use classification on remote sensing imagery in a tif file. "
        "Input a tif file storing remote sensing image, and output a raster file (tif format) after land use "
        "classification."
    ),
    "Raster_to_Vector": (
        "Use this tool when you need to convert raster files (e.g., tif format) to vector files. "
        "Input a raster file, and output the storage path of the converted vector file."
    ),
    "Mapping": (
        "Use this tool when you need to draw a map using geographic data stored in vector files (e.g., shapefiles). "
        "The input must be a vector file that needs to draw a map. The tool outputs the storage path of the drawn map."
    ),
}

# optional tools, registered only when extras are enabled
EXTRA_DESCRIPTIONS = {
    "Union": 'Input two shapefiles "A, B", return the area covered by either A or B (or both) as one dataset.',
    "Composite_Bands": (
        "Use this tool when you need to stack bands of several remote sensing images. Input two or more tif files "
        "with identical extent, separated by commas, and output one multi-band tif file."
    ),
}

COLLECTION_TOOLS = ("Get_POI_By_Keywords", "Get_POI_By_Polygon", "Get_Road_Network_By_Rectangle", "Get_Remote_Sensing_Image")
LOADER_TOOLS = {
    "Load_Subway_Data": ("Subway", "subway stations"),
    "Load_Hotel_Data": ("Hotel", "hotels"),
    "Load_Factory_Data": ("Factory", "factories"),
    "Load_Supermarket_Data": ("Supermarket", "supermarkets"),
    "Load_Remote_Sensing_Image_Data": ("RSImage", "remote sensing image"),
    "Load_Wuhan_Main_Urban_Data": ("WuhanMainUrban", "Wuhan main urban"),
}
ANALYSIS_TOOLS = ("Obtain location", "Buffer", "Intersect", "Clip", "Erase")
RS_TOOLS = ("Crop_Remote_Sensing_Image", "LandUse_Classification", "Raster_to_Vector")
MAPPING_TOOLS = ("Mapping",)
