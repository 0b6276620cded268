from sqlalchemy import create_engine as ce, MetaData
