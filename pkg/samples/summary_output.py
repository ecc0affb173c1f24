import os
import json
import logging

from gradcascade.output import SummaryOutput

logging.basicConfig(level=logging.DEBUG)

THIS_FOLDER = os.path.dirname(os.path.abspath(__file__))


def main():
    with open(os.path.join(THIS_FOLDER, 'summary.json')) as data:
        out = SummaryOutput(json.load(data))
        # out.colored = False
        for table in out.tables():
            print(table)


main()
