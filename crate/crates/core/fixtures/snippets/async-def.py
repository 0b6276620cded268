async def f():
    import aiohttp
